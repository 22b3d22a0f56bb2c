//! Small hand-checked instances used by tests, the verifier and the CLI demo.

use crate::model::{AgentId, EventLog, Instance, ParagraphId, VoteValue};

fn vote(a: u32, p: u32, v: i8) -> (AgentId, ParagraphId, VoteValue) {
    (AgentId(a), ParagraphId(p), VoteValue::from_i8(v).expect("vote in {-1,0,1}"))
}

fn build(n: u32, votes: &[(u32, u32, i8)]) -> Instance {
    let log = EventLog::from_votes(votes.iter().map(|&(a, p, v)| vote(a, p, v))).expect("valid log");
    Instance::with_agents(n, log).expect("agents in range")
}

/// Three agents, two logs with different paragraph sets but the same stance
/// (only `a2` approving `p3`).
pub fn stance_pair() -> (Instance, Instance) {
    (
        build(3, &[(1, 2, 1), (2, 3, 1), (1, 2, 0)]),
        build(3, &[(3, 1, 1), (2, 3, 1), (3, 1, 0)]),
    )
}

/// Five agents, four paragraphs, sixteen events.
///
/// | | p1 | p2 | p3 | p4 |
/// |---|---|---|---|---|
/// | a1 | + | + | + | + |
/// | a2 | + | 0 | + | 0 |
/// | a3 | + | 0 | − | + |
/// | a4 | − | 0 | − | + |
/// | a5 | − | 0 | 0 | − |
pub fn four_paragraphs() -> Instance {
    build(
        5,
        &[
            (1, 1, 1),
            (2, 1, 1),
            (3, 1, 1),
            (1, 2, 1),
            (4, 1, -1),
            (5, 1, -1),
            (2, 3, 1),
            (1, 3, 1),
            (3, 3, -1),
            (3, 4, 1),
            (1, 4, 1),
            (5, 4, -1),
            (2, 4, 1),
            (4, 4, 1),
            (2, 4, 0),
            (4, 3, -1),
        ],
    )
}

/// Twenty agents, fifty events, final tallies `p1 12/5`, `p2 5/4`, `p3 3/0`.
///
/// `a2` opposes `p1` and proposes `p2` at event 38; `a11` proposes `p3` at
/// event 48. Events 18–37 are vote-then-withdraw pairs on `p1`.
pub fn twenty_agents() -> Instance {
    build(20, &twenty_agent_script())
}

/// `(agent, paragraph, value)` for every event of [`twenty_agents`].
pub fn twenty_agent_script() -> Vec<(u32, u32, i8)> {
    let mut s = vec![(1, 1, 1), (2, 1, -1)];
    s.extend((3..=13).map(|a| (a, 1, 1)));
    s.extend((14..=17).map(|a| (a, 1, -1)));
    for k in 0..10 {
        let a = 18 + k % 3;
        s.push((a, 1, 1));
        s.push((a, 1, 0));
    }
    s.push((2, 2, 1));
    s.push((3, 2, 1));
    s.push((3, 2, -1));
    s.extend((4..=7).map(|a| (a, 2, 1)));
    s.extend((8..=10).map(|a| (a, 2, -1)));
    s.push((11, 3, 1));
    s.push((12, 3, 1));
    s.push((13, 3, 1));
    s
}
