use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{stance_of, AgentId, Instance, ModelError, ParagraphId, VoteValue};
use crate::scalar::Scalar;

/// How an agent's vote-count denominator `N_a` is counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightMode {
    /// Paragraphs on which the agent currently holds a nonzero stance.
    CurrentStance,
    /// Distinct paragraphs the agent ever cast a `±1` on, withdrawn or not.
    #[default]
    EverVoted,
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::CurrentStance => "CURRENT_STANCE",
            WeightMode::EverVoted => "EVER_VOTED",
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "CURRENT_STANCE" | "CURRENT" => Ok(WeightMode::CurrentStance),
            "EVER_VOTED" | "EVER" => Ok(WeightMode::EverVoted),
            other => Err(format!("unknown weight mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParagraphTally<S> {
    pub plus: usize,
    pub minus: usize,
    pub plus_rel: S,
    pub minus_rel: S,
}

/// Aggregate counts per paragraph plus the per-agent denominators used for
/// the relative (one-person-one-vote) sums.
#[derive(Clone, Debug, PartialEq)]
pub struct Tally<S> {
    paragraphs: BTreeMap<ParagraphId, ParagraphTally<S>>,
    weights: BTreeMap<AgentId, usize>,
    mode: WeightMode,
}

impl<S: Scalar> Tally<S> {
    pub fn get(&self, p: ParagraphId) -> Result<&ParagraphTally<S>, ModelError> {
        self.paragraphs.get(&p).ok_or(ModelError::UnknownParagraph(p))
    }

    pub fn paragraphs(&self) -> impl Iterator<Item = (ParagraphId, &ParagraphTally<S>)> {
        self.paragraphs.iter().map(|(&p, t)| (p, t))
    }

    /// `N_a` under the tally's weight mode; 0 for agents that never voted.
    pub fn weight(&self, a: AgentId) -> usize {
        self.weights.get(&a).copied().unwrap_or(0)
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }
}

/// Per-agent `N_a` for an instance.
pub fn vote_weights(instance: &Instance, mode: WeightMode) -> BTreeMap<AgentId, usize> {
    let mut weights: BTreeMap<AgentId, usize> =
        instance.agents().iter().map(|&a| (a, 0)).collect();
    match mode {
        WeightMode::CurrentStance => {
            for (a, _, _) in stance_of(instance).nonzero() {
                *weights.entry(a).or_default() += 1;
            }
        }
        WeightMode::EverVoted => {
            let ever: BTreeSet<(AgentId, ParagraphId)> = instance
                .log()
                .iter()
                .filter(|e| e.value.is_nonzero())
                .map(|e| (e.agent, e.paragraph))
                .collect();
            for (a, _) in ever {
                *weights.entry(a).or_default() += 1;
            }
        }
    }
    weights
}

pub fn tally_of<S: Scalar>(instance: &Instance, mode: WeightMode) -> Tally<S> {
    let stance = stance_of(instance);
    let weights = vote_weights(instance, mode);
    let mut paragraphs: BTreeMap<ParagraphId, ParagraphTally<S>> = instance
        .log()
        .paragraphs()
        .iter()
        .map(|&p| {
            (
                p,
                ParagraphTally {
                    plus: 0,
                    minus: 0,
                    plus_rel: S::zero(),
                    minus_rel: S::zero(),
                },
            )
        })
        .collect();
    for (a, p, v) in stance.nonzero() {
        let n_a = weights.get(&a).copied().unwrap_or(0);
        let t = paragraphs.get_mut(&p).expect("stance paragraph is in P(E)");
        // n_a >= 1 whenever the agent holds a stance, under either mode.
        let share = if n_a > 0 {
            S::from_ratio(1, n_a as u64)
        } else {
            S::zero()
        };
        match v {
            VoteValue::Approve => {
                t.plus += 1;
                t.plus_rel = t.plus_rel + share;
            }
            VoteValue::Disapprove => {
                t.minus += 1;
                t.minus_rel = t.minus_rel + share;
            }
            VoteValue::Abstain => unreachable!("stance matrix stores nonzero entries only"),
        }
    }
    Tally {
        paragraphs,
        weights,
        mode,
    }
}
