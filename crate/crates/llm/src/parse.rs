use std::fmt;

use ccr_core::model::{ParagraphId, VoteValue};
use ccr_core::populations::{AgentAction, AgentView, Payload};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionKind {
    Propose,
    Vote,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoteToken {
    Upvote,
    Downvote,
    Abstain,
}

impl VoteToken {
    pub fn value(self) -> VoteValue {
        match self {
            VoteToken::Upvote => VoteValue::Approve,
            VoteToken::Downvote => VoteValue::Disapprove,
            VoteToken::Abstain => VoteValue::Abstain,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VoteToken::Upvote => "UPVOTE",
            VoteToken::Downvote => "DOWNVOTE",
            VoteToken::Abstain => "ABSTAIN",
        }
    }
}

impl fmt::Display for VoteToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsedDecision {
    pub decision: DecisionKind,
    pub paragraph_id: u32,
    pub action_text: String,
    pub vote: VoteToken,
    pub reasoning: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("response has no {0} field")]
    MalformedResponse(&'static str),
    #[error("unrecognized vote token {0:?}")]
    InvalidVoteToken(String),
    #[error("unrecognized decision {0:?}")]
    InvalidDecision(String),
    #[error("no paragraph number in {0:?}")]
    InvalidParagraphId(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error("cannot abstain on {0}: you hold no vote there")]
    IllegalAbstain(ParagraphId),
    #[error("you already hold {vote} on {paragraph}")]
    RepeatedVote { paragraph: ParagraphId, vote: VoteToken },
    #[error("paragraph {0} does not exist")]
    UnknownParagraph(ParagraphId),
    #[error("a new proposal must use id {expected}, not {got}")]
    BadProposalId { expected: u32, got: u32 },
    #[error("the proposal text is empty")]
    EmptyProposal,
}

const FIELDS: [&str; 5] = ["DECISION", "PARAGRAPH ID", "ACTION DETAILS", "VOTE", "REASONING"];

/// Index into `FIELDS` and the value part of a labelled line.
fn labelled(line: &str) -> Option<(usize, &str)> {
    let line = line.trim_start_matches(|c: char| c.is_whitespace() || matches!(c, '*' | '#' | '-' | '>' | '_'));
    let colon = line.find(':')?;
    let label: String = line[..colon]
        .chars()
        .filter(|c| !matches!(c, '*' | '_'))
        .collect::<String>()
        .replace(['_', '-'], " ")
        .trim()
        .to_ascii_uppercase();
    let k = FIELDS.iter().position(|name| *name == label)?;
    Some((k, &line[colon + 1..]))
}

fn clean(value: &str) -> String {
    value
        .trim()
        .trim_matches(|c: char| matches!(c, '*' | '`' | '"' | '[' | ']') || c.is_whitespace())
        .to_string()
}

fn vote_token(raw: &str) -> Result<VoteToken, ParseError> {
    let mut key: String = raw
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-'))
        .collect::<String>()
        .to_ascii_uppercase();
    // signs only matter on numeric tokens ("DOWN-VOTE" is "DOWNVOTE")
    if key.chars().any(|c| c.is_ascii_alphabetic()) {
        key.retain(|c| c.is_ascii_alphanumeric());
    }
    Ok(match key.as_str() {
        "UPVOTE" | "UP" | "+1" | "1" | "APPROVE" | "YES" => VoteToken::Upvote,
        "DOWNVOTE" | "DOWN" | "-1" | "DISAPPROVE" | "NO" => VoteToken::Downvote,
        "ABSTAIN" | "0" | "NEUTRAL" => VoteToken::Abstain,
        _ => return Err(ParseError::InvalidVoteToken(raw.trim().to_string())),
    })
}

/// Pulls the five labelled fields out of a model reply.
///
/// Labels match case-insensitively with markdown decoration stripped; the
/// first occurrence of each wins, and a value runs on over following lines
/// until a blank line or the next label.
pub fn parse_decision(raw: &str) -> Result<ParsedDecision, ParseError> {
    let mut values: [Option<String>; 5] = Default::default();
    let mut current: Option<usize> = None;
    for line in raw.lines() {
        if let Some((k, rest)) = labelled(line) {
            if values[k].is_none() {
                values[k] = Some(clean(rest));
                current = Some(k);
            } else {
                current = None;
            }
        } else if line.trim().is_empty() {
            current = None;
        } else if let Some(k) = current {
            let v = values[k].as_mut().expect("set when labelled");
            if !v.is_empty() {
                v.push(' ');
            }
            v.push_str(&clean(line));
        }
    }
    let take = |k: usize| values[k].clone().ok_or(ParseError::MalformedResponse(FIELDS[k]));
    let decision_raw = take(0)?;
    let decision = match decision_raw
        .split(|c: char| !c.is_ascii_alphabetic())
        .find(|w| !w.is_empty())
        .map(str::to_ascii_uppercase)
        .as_deref()
    {
        Some("PROPOSE") => DecisionKind::Propose,
        Some("VOTE") => DecisionKind::Vote,
        _ => return Err(ParseError::InvalidDecision(decision_raw)),
    };
    let id_raw = take(1)?;
    let paragraph_id = id_raw
        .split(|c: char| !c.is_ascii_digit())
        .find(|t| !t.is_empty())
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| ParseError::InvalidParagraphId(id_raw.clone()))?;
    let action_text = take(2)?;
    let vote = vote_token(&take(3)?)?;
    let reasoning = take(4)?;
    Ok(ParsedDecision {
        decision,
        paragraph_id,
        action_text,
        vote,
        reasoning,
    })
}

/// Checks a parsed decision against the agent's view and turns it into an
/// action the scheduler can apply.
///
/// A proposal always enters with the proposer's +1, whatever vote token
/// accompanied it.
pub fn validate_action(decision: &ParsedDecision, view: &AgentView) -> Result<AgentAction, ActionError> {
    let p = ParagraphId(decision.paragraph_id);
    match decision.decision {
        DecisionKind::Propose => {
            if p != view.next_paragraph {
                return Err(ActionError::BadProposalId {
                    expected: view.next_paragraph.0,
                    got: p.0,
                });
            }
            let text = decision.action_text.trim();
            if text.is_empty() {
                return Err(ActionError::EmptyProposal);
            }
            Ok(AgentAction::Propose(Payload::Text(text.to_string())))
        }
        DecisionKind::Vote => {
            let state = view.get(p).ok_or(ActionError::UnknownParagraph(p))?;
            let v = decision.vote.value();
            if v == VoteValue::Abstain && state.own == VoteValue::Abstain {
                return Err(ActionError::IllegalAbstain(p));
            }
            if v == state.own {
                return Err(ActionError::RepeatedVote {
                    paragraph: p,
                    vote: decision.vote,
                });
            }
            Ok(AgentAction::Vote(p, v))
        }
    }
}

/// The answer format the decision template asks for.
pub fn format_decision(d: &ParsedDecision) -> String {
    let kind = match d.decision {
        DecisionKind::Propose => "PROPOSE",
        DecisionKind::Vote => "VOTE",
    };
    format!(
        "DECISION: {kind}\nPARAGRAPH ID: {}\nACTION DETAILS: {}\nVOTE: {}\nREASONING: {}\n",
        d.paragraph_id, d.action_text, d.vote, d.reasoning
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerates_markdown_and_prose() {
        let raw = "Sure, here is my answer.\n\n**Decision:** vote\n**Paragraph ID:** p3\n**Action details:** Plant trees\n**Vote:** down-vote\n**Reasoning:** too costly\nfor now\n\nThanks!";
        let d = parse_decision(raw).unwrap();
        assert_eq!(d.decision, DecisionKind::Vote);
        assert_eq!(d.paragraph_id, 3);
        assert_eq!(d.vote, VoteToken::Downvote);
        assert_eq!(d.reasoning, "too costly for now");
    }

    #[test]
    fn missing_and_bad_fields() {
        let raw = "DECISION: VOTE\nPARAGRAPH ID: 1\nACTION DETAILS: x\nREASONING: y";
        assert_eq!(parse_decision(raw), Err(ParseError::MalformedResponse("VOTE")));
        let raw = "DECISION: VOTE\nPARAGRAPH ID: 1\nACTION DETAILS: x\nVOTE: maybe\nREASONING: y";
        assert!(matches!(parse_decision(raw), Err(ParseError::InvalidVoteToken(t)) if t == "maybe"));
        let raw = "DECISION: PASS\nPARAGRAPH ID: 1\nACTION DETAILS: x\nVOTE: UPVOTE\nREASONING: y";
        assert!(matches!(parse_decision(raw), Err(ParseError::InvalidDecision(_))));
        let raw = "DECISION: VOTE\nPARAGRAPH ID: next\nACTION DETAILS: x\nVOTE: UPVOTE\nREASONING: y";
        assert!(matches!(parse_decision(raw), Err(ParseError::InvalidParagraphId(_))));
    }

    #[test]
    fn format_round_trips() {
        let d = ParsedDecision {
            decision: DecisionKind::Vote,
            paragraph_id: 4,
            action_text: "Keep the bus lanes".into(),
            vote: VoteToken::Abstain,
            reasoning: "Undecided now".into(),
        };
        assert_eq!(parse_decision(&format_decision(&d)).unwrap(), d);
    }
}
