use std::collections::BTreeMap;

use rayon::prelude::*;

use super::WelfareError;
use crate::model::{active_agents, stance_of, tally_of, vote_weights, AgentId, Instance, LiveTally, ParagraphId, WeightMode};
use crate::rules::Solution;
use crate::scalar::Scalar;

pub const ORACLE_MAX_PARAGRAPHS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SatisfactionReport<S> {
    pub per_agent: BTreeMap<AgentId, S>,
    /// Sum over agents.
    pub community: S,
    /// `community / N_active`, 0 when nobody holds a stance.
    pub normalized: S,
}

/// Agent-major satisfaction: each agent earns `1/N_a` for every paragraph
/// whose inclusion matches its (nonzero) stance.
pub fn satisfaction<S: Scalar>(instance: &Instance, solution: &Solution, mode: WeightMode) -> SatisfactionReport<S> {
    let stance = stance_of(instance);
    let weights = vote_weights(instance, mode);
    let mut per_agent = BTreeMap::new();
    let mut community = S::zero();
    for &a in instance.agents() {
        let n = weights.get(&a).copied().unwrap_or(0);
        let mut sat = S::zero();
        if n > 0 {
            let share = S::from_ratio(1, n as u64);
            for (p, v) in stance.row(a) {
                if v.as_i8() == solution_sign(solution, p) {
                    sat = sat + share;
                }
            }
        }
        community = community + sat;
        per_agent.insert(a, sat);
    }
    let active = active_agents(instance);
    let normalized = if active == 0 {
        S::zero()
    } else {
        community / S::from_count(active)
    };
    SatisfactionReport {
        per_agent,
        community,
        normalized,
    }
}

fn solution_sign(solution: &Solution, p: ParagraphId) -> i8 {
    if solution.contains(p) {
        1
    } else {
        -1
    }
}

/// Community satisfaction summed paragraph by paragraph: an included
/// paragraph contributes `p⁺ᵣ`, an excluded one `p⁻ᵣ`.
pub fn community_by_paragraph<S: Scalar>(instance: &Instance, solution: &Solution, mode: WeightMode) -> S {
    tally_of::<S>(instance, mode)
        .paragraphs()
        .fold(S::zero(), |acc, (p, t)| {
            acc + if solution.contains(p) {
                t.plus_rel
            } else {
                t.minus_rel
            }
        })
}

/// Normalized satisfaction of `solution` against a live tally.
pub fn normalized_satisfaction_live<S: Scalar>(tally: &LiveTally, solution: &Solution, mode: WeightMode) -> S {
    let ids = tally.paragraph_ids();
    let signs: Vec<i8> = ids.iter().map(|&p| solution_sign(solution, p)).collect();
    let mut community = S::zero();
    for i in 0..tally.n_agents() {
        let n = tally.weight_at(i, mode);
        if n == 0 {
            continue;
        }
        let matches = tally
            .stance_row(i)
            .iter()
            .zip(&signs)
            .filter(|(v, s)| **v != 0 && *v == *s)
            .count();
        community = community + S::from_ratio(matches as u64, n as u64);
    }
    match tally.active_agents() {
        0 => S::zero(),
        active => community / S::from_count(active),
    }
}

/// Every solution maximizing community satisfaction, found by trying all
/// `2^|P(E)|` subsets and scoring each agent by agent.
pub fn swm_oracle<S: Scalar>(instance: &Instance, mode: WeightMode) -> Result<Vec<Solution>, WelfareError> {
    let paragraphs: Vec<ParagraphId> = instance.log().paragraphs().iter().copied().collect();
    let k = paragraphs.len();
    if k > ORACLE_MAX_PARAGRAPHS {
        return Err(WelfareError::TooManyParagraphs {
            found: k,
            cap: ORACLE_MAX_PARAGRAPHS,
        });
    }
    let stance = stance_of(instance);
    let weights = vote_weights(instance, mode);
    // Dense rows of (weight, stance per paragraph) for agents with a vote.
    let rows: Vec<(S, Vec<i8>)> = instance
        .agents()
        .iter()
        .filter_map(|&a| {
            let n = weights.get(&a).copied().unwrap_or(0);
            (n > 0).then(|| {
                let row = paragraphs.iter().map(|&p| stance.get(a, p).as_i8()).collect();
                (S::from_ratio(1, n as u64), row)
            })
        })
        .collect();

    let value = |mask: u32| -> S {
        let mut total = S::zero();
        for (share, row) in &rows {
            for (j, &v) in row.iter().enumerate() {
                let s = if mask >> j & 1 == 1 { 1 } else { -1 };
                if v == s {
                    total = total + *share;
                }
            }
        }
        total
    };
    let scored: Vec<(u32, S)> = (0..1u32 << k).into_par_iter().map(|m| (m, value(m))).collect();
    let best = scored.iter().fold(S::zero(), |acc, (_, v)| acc.max_of(*v));
    Ok(scored
        .into_iter()
        .filter(|(_, v)| v.approx_eq(best))
        .map(|(m, _)| {
            (0..k)
                .filter(|j| m >> j & 1 == 1)
                .map(|j| paragraphs[j])
                .collect()
        })
        .collect())
}
