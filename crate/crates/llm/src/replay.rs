//! A fixed, fully scripted conversation for the twenty-agent example log:
//! each turn's reply is canned, so running it through the LLM policy must
//! reproduce the log event for event.

use ccr_core::fixtures::twenty_agent_script;
use ccr_core::model::AgentId;

use crate::parse::{format_decision, DecisionKind, ParsedDecision, VoteToken};

pub const PARAGRAPH_TEXTS: [&str; 3] = [
    "Implement community gardens in urban areas to promote local food production and biodiversity.",
    "Maintain current agricultural practices without promoting new sustainability initiatives",
    "Offer tax rebates to households that install rooftop solar panels or heat pumps.",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    /// Agent selected on each turn.
    pub order: Vec<AgentId>,
    /// Raw model reply for each turn.
    pub replies: Vec<String>,
}

pub fn example_transcript() -> Transcript {
    let mut seen = 0u32;
    let mut order = Vec::new();
    let mut replies = Vec::new();
    for (a, p, v) in twenty_agent_script() {
        order.push(AgentId(a));
        let d = if p > seen {
            seen = p;
            ParsedDecision {
                decision: DecisionKind::Propose,
                paragraph_id: p,
                action_text: PARAGRAPH_TEXTS[p as usize - 1].to_string(),
                vote: VoteToken::Upvote,
                reasoning: "This belongs in the plan.".into(),
            }
        } else {
            ParsedDecision {
                decision: DecisionKind::Vote,
                paragraph_id: p,
                action_text: PARAGRAPH_TEXTS[p as usize - 1].to_string(),
                vote: match v {
                    1 => VoteToken::Upvote,
                    -1 => VoteToken::Downvote,
                    _ => VoteToken::Abstain,
                },
                reasoning: "My view on this paragraph.".into(),
            }
        };
        replies.push(format_decision(&d));
    }
    Transcript { order, replies }
}
