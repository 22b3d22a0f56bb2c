use rand::Rng;
use rand::seq::IndexedRandom;

use super::{AgentAction, AgentView, Payload};
use crate::model::VoteValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnstructuredDraw {
    Propose,
    Vote,
    Abstain,
}

/// One turn of the unstructured agent: propose, cast a random ±1 on a random
/// paragraph, or withdraw one of its ±1 stances, each with probability 1/3.
/// A draw that cannot be carried out becomes a proposal.
pub fn unstructured_step<R: Rng + ?Sized>(view: &AgentView, rng: &mut R) -> AgentAction {
    let draw = match rng.random_range(0..3) {
        0 => UnstructuredDraw::Propose,
        1 => UnstructuredDraw::Vote,
        _ => UnstructuredDraw::Abstain,
    };
    unstructured_action(view, draw, rng)
}

pub(crate) fn unstructured_action<R: Rng + ?Sized>(
    view: &AgentView,
    draw: UnstructuredDraw,
    rng: &mut R,
) -> AgentAction {
    match draw {
        UnstructuredDraw::Vote => {
            if let Some(p) = view.paragraphs.choose(rng) {
                let v = if rng.random_bool(0.5) {
                    VoteValue::Approve
                } else {
                    VoteValue::Disapprove
                };
                return AgentAction::Vote(p.id, v);
            }
        }
        UnstructuredDraw::Abstain => {
            let held: Vec<_> = view.paragraphs.iter().filter(|p| p.own.is_nonzero()).collect();
            if let Some(p) = held.choose(rng) {
                return AgentAction::Vote(p.id, VoteValue::Abstain);
            }
        }
        UnstructuredDraw::Propose => {}
    }
    AgentAction::Propose(Payload::None)
}
