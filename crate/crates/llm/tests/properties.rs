use ccr_llm::parse::{format_decision, parse_decision, DecisionKind, ParsedDecision, VoteToken};
use ccr_llm::SentimentCategory;
use proptest::prelude::*;

fn decision() -> impl Strategy<Value = ParsedDecision> {
    (
        any::<bool>(),
        1u32..500,
        "[A-Za-z][A-Za-z ,.]{0,60}[a-z.]",
        prop_oneof![Just(VoteToken::Upvote), Just(VoteToken::Downvote), Just(VoteToken::Abstain)],
        "[A-Za-z][A-Za-z ,]{0,40}[a-z]",
    )
        .prop_map(|(propose, id, text, vote, reasoning)| ParsedDecision {
            decision: if propose { DecisionKind::Propose } else { DecisionKind::Vote },
            paragraph_id: id,
            action_text: text,
            vote,
            reasoning,
        })
}

proptest! {
    #[test]
    fn formatted_decisions_parse_back(d in decision()) {
        prop_assert_eq!(parse_decision(&format_decision(&d)).unwrap(), d);
    }

    #[test]
    fn every_score_has_one_bucket(k in 0u32..=100) {
        let x = k as f64 / 100.0;
        let c = SentimentCategory::of(x).unwrap();
        prop_assert!(c.contains(x));
        prop_assert_eq!(SentimentCategory::ALL.iter().filter(|c| c.contains(x)).count(), 1);
    }
}
