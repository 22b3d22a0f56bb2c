use std::collections::BTreeMap;

use crate::model::{AgentId, LiveTally, ParagraphId, VoteValue};
use crate::rules::Solution;

/// What a paragraph carries besides its id: nothing for unstructured
/// agents, a point in `[0, 1]` for Euclidean ones, prose for LLM agents.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Payload {
    #[default]
    None,
    Position(f64),
    Text(String),
}

impl Payload {
    pub fn position(&self) -> Option<f64> {
        match *self {
            Payload::Position(x) => Some(x),
            _ => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Payload::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AgentAction {
    /// New paragraph at the next free id, with the proposer's implicit +1.
    Propose(Payload),
    Vote(ParagraphId, VoteValue),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParagraphState {
    pub id: ParagraphId,
    pub payload: Payload,
    pub plus: u32,
    pub minus: u32,
    pub own: VoteValue,
    pub in_document: bool,
}

/// Everything an agent may look at when deciding: the tally, its own
/// stances and the current document. No event history.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentView {
    pub agent: AgentId,
    pub paragraphs: Vec<ParagraphState>,
    pub next_paragraph: ParagraphId,
}

impl AgentView {
    pub fn build(
        agent: AgentId,
        tally: &LiveTally,
        solution: &Solution,
        payloads: &BTreeMap<ParagraphId, Payload>,
    ) -> Self {
        let paragraphs: Vec<ParagraphState> = tally
            .paragraph_ids()
            .iter()
            .enumerate()
            .map(|(j, &p)| ParagraphState {
                id: p,
                payload: payloads.get(&p).cloned().unwrap_or_default(),
                plus: tally.plus(j),
                minus: tally.minus(j),
                own: tally.stance(agent, p),
                in_document: solution.contains(p),
            })
            .collect();
        let next_paragraph = paragraphs
            .iter()
            .map(|s| s.id)
            .max()
            .map_or(ParagraphId(1), ParagraphId::next);
        AgentView {
            agent,
            paragraphs,
            next_paragraph,
        }
    }

    pub fn get(&self, p: ParagraphId) -> Option<&ParagraphState> {
        self.paragraphs.iter().find(|s| s.id == p)
    }

    pub fn is_empty(&self) -> bool {
        self.paragraphs.is_empty()
    }
}
