use ccr_core::fixtures::{four_paragraphs, twenty_agents};
use ccr_core::model::{AgentId, EventLog, Instance, ParagraphId, VoteValue, WeightMode};
use ccr_core::rules::*;
use ccr_core::Exact;

const TOL: f64 = 5e-3;

fn p(n: u32) -> ParagraphId {
    ParagraphId(n)
}

fn sol(ids: &[u32]) -> Solution {
    ids.iter().map(|&n| p(n)).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn rule(s: &str) -> RuleSpec {
    s.parse().unwrap()
}

#[test]
fn static_scores_on_four_paragraph_instance() {
    let inst = four_paragraphs();
    let ev = WeightMode::EverVoted;
    let aps = static_scores::<f64>(&StaticKernel::Aps, &inst, ev);
    for (n, want) in [(1, 0.60), (2, 1.0), (3, 0.50), (4, 0.75)] {
        assert!(close(aps[&p(n)], want), "APS p{n} = {}", aps[&p(n)]);
    }
    let raps = static_scores::<f64>(&StaticKernel::Raps, &inst, ev);
    for (n, want) in [(1, 0.52), (2, 1.0), (3, 0.47), (4, 0.65)] {
        assert!(close(raps[&p(n)], want), "RAPS p{n} = {}", raps[&p(n)]);
    }
    let rams = static_scores::<f64>(&StaticKernel::rams(0.25), &inst, ev);
    for (n, want) in [(1, 0.52), (2, 0.0), (3, 0.47), (4, 0.65)] {
        assert!(close(rams[&p(n)], want), "0.25-RAMS p{n} = {}", rams[&p(n)]);
    }
    let rams = static_scores::<f64>(&StaticKernel::rams(0.75), &inst, ev);
    assert!(rams.values().all(|&s| s == 0.0));
}

#[test]
fn static_solutions_on_four_paragraph_instance() {
    let inst = four_paragraphs();
    assert_eq!(ccr_solution::<f64>(&rule("APS||0.5"), &inst), sol(&[1, 2, 3, 4]));
    assert_eq!(ccr_solution::<f64>(&rule("RAPS||0.5"), &inst), sol(&[1, 2, 4]));
    assert_eq!(ccr_solution::<f64>(&rule("RAMS:0.25||0.5"), &inst), sol(&[1, 4]));
    assert_eq!(ccr_solution::<f64>(&rule("RAMS:0.75||0.5"), &inst), sol(&[]));
    // exact arithmetic agrees
    assert_eq!(ccr_solution::<Exact>(&rule("RAPS||0.5"), &inst), sol(&[1, 2, 4]));
}

#[test]
fn unknown_paragraph_is_an_error() {
    let inst = four_paragraphs();
    assert!(matches!(
        static_score::<f64>(&StaticKernel::Aps, p(9), &inst, WeightMode::EverVoted),
        Err(RuleError::UnknownParagraph(_))
    ));
    assert!(matches!(
        dynamic_score::<f64>(&rule("APS|SMOOTH:NUM_EVENTS:0.1|0.5"), p(9), &inst),
        Err(RuleError::UnknownParagraph(_))
    ));
}

#[test]
fn smooth_score_of_p1() {
    let inst = four_paragraphs();
    let s = dynamic_score::<f64>(&rule("APS|SMOOTH:NUM_EVENTS:0.1|0.5"), p(1), &inst).unwrap();
    assert!(close(s, 0.316), "{s}");
    let s0 = dynamic_score::<f64>(&rule("APS|SMOOTH:NUM_EVENTS:0|0.5"), p(1), &inst).unwrap();
    assert!(close(s0, 0.60));
}

#[test]
fn harsh_at_full_length_is_static() {
    let inst = four_paragraphs();
    for n in 1..=4 {
        let h = dynamic_score::<f64>(&rule("RAPS|HARSH:NUM_EVENTS:16|0.5"), p(n), &inst).unwrap();
        let s = static_score::<f64>(&StaticKernel::Raps, p(n), &inst, WeightMode::EverVoted).unwrap();
        assert_eq!(h, s);
    }
}

#[test]
fn param_values() {
    let inst = four_paragraphs();
    assert_eq!(param_value(DynamicParam::NumEvents, &inst, None).unwrap(), 16);
    let (e1, _) = ccr_core::fixtures::stance_pair();
    assert_eq!(param_value(DynamicParam::NumParagraphs, &e1, None).unwrap(), 2);

    let one = Instance::with_agents(
        1,
        EventLog::from_votes([(AgentId(1), p(1), VoteValue::Approve)]).unwrap(),
    )
    .unwrap();
    let r = rule("APS||0.5");
    assert_eq!(param_value(DynamicParam::NumUpdates, &one, Some(&r)).unwrap(), 0);
    assert!(matches!(
        param_value(DynamicParam::NumUpdates, &one, None),
        Err(RuleError::MissingRule(_))
    ));
}

#[test]
fn harsh_prefix_lengths() {
    let inst = four_paragraphs();
    assert_eq!(harsh_prefix(&inst, DynamicParam::NumEvents, 7, None).unwrap(), 7);
    assert_eq!(harsh_prefix(&inst, DynamicParam::NumEvents, 0, None).unwrap(), 0);
    assert_eq!(harsh_prefix(&inst, DynamicParam::NumEvents, 100, None).unwrap(), 16);
}

#[test]
fn three_event_trajectory() {
    let log = EventLog::from_votes([
        (AgentId(1), p(1), VoteValue::Approve),
        (AgentId(2), p(1), VoteValue::Disapprove),
        (AgentId(3), p(1), VoteValue::Disapprove),
    ])
    .unwrap();
    let inst = Instance::with_agents(3, log).unwrap();
    let t = ccr_trajectory(&rule("APS||0.5"), &inst);
    assert_eq!(t.prefix_solutions, vec![sol(&[1]), sol(&[1]), sol(&[])]);
    assert_eq!(t.update_indices, vec![2]);
    assert_eq!(t.updates(), 1);

    let single = inst.prefix(1);
    let t = ccr_trajectory(&rule("APS||0.5"), &single);
    assert_eq!(t.len(), 1);
    assert_eq!(t.updates(), 0);
}

#[test]
fn trajectory_ends_at_static_solution() {
    let inst = four_paragraphs();
    let t = ccr_trajectory(&rule("RAPS||0.5"), &inst);
    assert_eq!(t.last().unwrap(), &sol(&[1, 2, 4]));
}

#[test]
fn twenty_agent_deliberation() {
    let inst = twenty_agents();
    assert_eq!(inst.log().len(), 50);
    assert_eq!(ccr_solution::<f64>(&rule("APS||0.7"), &inst), sol(&[1, 3]));
    let s = static_score::<Exact>(&StaticKernel::Aps, p(2), &inst, WeightMode::EverVoted).unwrap();
    assert_eq!(s, Exact::new(5, 9));
}

#[test]
fn empty_log_gives_empty_solution() {
    let inst = Instance::empty(4);
    for r in build_rule_grid(&GridSpec::full()).unwrap() {
        assert!(ccr_solution::<f64>(&r, &inst).is_empty());
    }
}

#[test]
fn relative_majority() {
    let inst = four_paragraphs();
    assert_eq!(
        rm_solution::<f64>(&inst, WeightMode::EverVoted, TieBreak::default()),
        sol(&[1, 2, 4])
    );
    let one = Instance::with_agents(
        2,
        EventLog::from_votes([(AgentId(1), p(1), VoteValue::Approve)]).unwrap(),
    )
    .unwrap();
    assert_eq!(rm_solution::<f64>(&one, WeightMode::EverVoted, TieBreak::ExcludeOnTie), sol(&[1]));
}

#[test]
fn relative_majority_ties() {
    // a1 and a2 each vote on one paragraph: p1 at +1 vs -1, an exact tie.
    let log = EventLog::from_votes([
        (AgentId(1), p(1), VoteValue::Approve),
        (AgentId(2), p(1), VoteValue::Disapprove),
        (AgentId(1), p(2), VoteValue::Approve),
        (AgentId(2), p(2), VoteValue::Approve),
    ])
    .unwrap();
    let inst = Instance::with_agents(2, log).unwrap();
    let ex = rm_solution::<Exact>(&inst, WeightMode::EverVoted, TieBreak::ExcludeOnTie);
    let inc = rm_solution::<Exact>(&inst, WeightMode::EverVoted, TieBreak::IncludeOnTie);
    assert_eq!(ex, sol(&[2]));
    assert_eq!(inc, sol(&[1, 2]));
}

#[test]
fn sentinel_examples() {
    let star = p(99);
    let a = AgentId(1);
    let log = EventLog::from_votes([
        (a, star, VoteValue::Approve),
        (a, p(1), VoteValue::Approve),
        (a, p(2), VoteValue::Approve),
        (a, star, VoteValue::Abstain),
    ])
    .unwrap();
    assert_eq!(sentinel_rule(&log, star), sol(&[1, 2]));
    let later = log
        .append(AgentId(2), p(3), VoteValue::Approve)
        .unwrap()
        .append(AgentId(2), p(1), VoteValue::Disapprove)
        .unwrap();
    assert_eq!(sentinel_rule(&later, star), sol(&[1, 2]));

    let inst = four_paragraphs();
    assert_eq!(sentinel_rule(inst.log(), star), sol(&[1, 2, 3, 4]));
}
