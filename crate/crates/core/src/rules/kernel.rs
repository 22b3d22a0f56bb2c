use std::collections::BTreeMap;

use super::RuleError;
use crate::model::{active_agents, tally_of, Instance, LiveTally, ParagraphId, WeightMode};
use crate::scalar::Scalar;

/// What `β` multiplies in the RAMS participation gate `p⁺ ≥ β·N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RamsBase {
    /// All agents of the instance.
    #[default]
    TotalAgents,
    /// Agents with at least one nonzero stance.
    ActiveAgents,
}

/// Static consensus scoring functions: scores depend on the stance matrix
/// only (and, for RAPS/RAMS, on the vote-count denominators).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StaticKernel {
    /// Approval proportion `p⁺ / (p⁺ + p⁻)`.
    Aps,
    /// Relative approval proportion `p⁺ᵣ / (p⁺ᵣ + p⁻ᵣ)`.
    Raps,
    /// RAPS gated on a minimum number of approvals.
    Rams { beta: f64, base: RamsBase },
}

impl StaticKernel {
    pub fn rams(beta: f64) -> Self {
        StaticKernel::Rams {
            beta,
            base: RamsBase::TotalAgents,
        }
    }

    /// APS, RAPS and the four β-RAMS variants of the experimental grid.
    pub fn grid_kernels() -> Vec<StaticKernel> {
        let mut out = vec![StaticKernel::Aps, StaticKernel::Raps];
        out.extend([0.05, 0.1, 0.3, 0.5].map(StaticKernel::rams));
        out
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        if let StaticKernel::Rams { beta, .. } = *self {
            if !(0.0..=1.0).contains(&beta) {
                return Err(RuleError::Domain {
                    what: "beta",
                    value: beta,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn needs_relative(&self) -> bool {
        !matches!(self, StaticKernel::Aps)
    }

    /// Score from one paragraph's counts. `population` is the size the RAMS
    /// gate is measured against (ignored by the other kernels).
    pub(crate) fn score_counts<S: Scalar>(
        &self,
        plus: usize,
        minus: usize,
        plus_rel: S,
        minus_rel: S,
        population: usize,
    ) -> S {
        if plus + minus == 0 {
            return S::zero();
        }
        let raps = || {
            let den = plus_rel + minus_rel;
            if den == S::zero() {
                S::zero()
            } else {
                plus_rel / den
            }
        };
        match *self {
            StaticKernel::Aps => S::from_ratio(plus as u64, (plus + minus) as u64),
            StaticKernel::Raps => raps(),
            StaticKernel::Rams { beta, .. } => {
                // Slack keeps products like 0.1·30 from landing just above 3.
                if plus as f64 >= beta * population as f64 - 1e-9 {
                    raps()
                } else {
                    S::zero()
                }
            }
        }
    }

    pub(crate) fn gate_population(&self, n_agents: usize, active: impl FnOnce() -> usize) -> usize {
        match self {
            StaticKernel::Rams {
                base: RamsBase::ActiveAgents,
                ..
            } => active(),
            _ => n_agents,
        }
    }

    /// Scores for every paragraph index of a live tally.
    pub(crate) fn score_live<S: Scalar>(&self, tally: &LiveTally, mode: WeightMode) -> Vec<S> {
        let n = tally.num_paragraphs();
        let population = self.gate_population(tally.n_agents(), || tally.active_agents());
        let (plus_rel, minus_rel) = if self.needs_relative() {
            tally.relative::<S>(mode)
        } else {
            (vec![S::zero(); n], vec![S::zero(); n])
        };
        (0..n)
            .map(|j| {
                self.score_counts(
                    tally.plus(j) as usize,
                    tally.minus(j) as usize,
                    plus_rel[j],
                    minus_rel[j],
                    population,
                )
            })
            .collect()
    }
}

/// Static score of every paragraph in `P(E)`, derived from a batch tally.
pub fn static_scores<S: Scalar>(
    kernel: &StaticKernel,
    instance: &Instance,
    mode: WeightMode,
) -> BTreeMap<ParagraphId, S> {
    let tally = tally_of::<S>(instance, mode);
    let population = kernel.gate_population(instance.n_agents(), || active_agents(instance));
    tally
        .paragraphs()
        .map(|(p, t)| {
            (
                p,
                kernel.score_counts(t.plus, t.minus, t.plus_rel, t.minus_rel, population),
            )
        })
        .collect()
}

pub fn static_score<S: Scalar>(
    kernel: &StaticKernel,
    paragraph: ParagraphId,
    instance: &Instance,
    mode: WeightMode,
) -> Result<S, RuleError> {
    if !instance.log().contains_paragraph(paragraph) {
        return Err(RuleError::UnknownParagraph(paragraph));
    }
    Ok(static_scores::<S>(kernel, instance, mode)[&paragraph])
}
