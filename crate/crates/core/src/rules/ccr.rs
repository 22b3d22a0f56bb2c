use std::collections::BTreeMap;

use super::dynamics::f_exp_unchecked;
use super::{harsh_prefix, param_value, static_scores, Dynamizer, RuleError, RuleSpec, Solution, Trajectory};
use crate::model::{AgentId, Event, Instance, LiveTally, ParagraphId};
use crate::scalar::Scalar;

/// Walks a log one event at a time, keeping the rule's current scores and
/// solution (the attach/detach loop over prefixes).
///
/// Rule-relative parameters are read off the evaluator's own history: while
/// processing event `i`, a smooth rule sees the update count and solution
/// size over events `1..i-1`; a harsh rule checks its cutoff after each
/// prefix is decided, so the freeze point never depends on itself.
#[derive(Clone, Debug)]
pub struct RuleEvaluator<S: Scalar> {
    rule: RuleSpec,
    tally: LiveTally,
    threshold: S,
    scores: Vec<S>,
    solution: Solution,
    // Scores at the harsh cutoff, indexed like the live tally's paragraphs.
    frozen: Option<Vec<S>>,
    steps: usize,
    update_indices: Vec<usize>,
}

impl<S: Scalar> RuleEvaluator<S> {
    pub fn new<I: IntoIterator<Item = AgentId>>(rule: &RuleSpec, agents: I) -> Self {
        let mut ev = RuleEvaluator {
            rule: *rule,
            tally: LiveTally::new(agents),
            threshold: S::from_f64(rule.threshold),
            scores: Vec::new(),
            solution: Solution::new(),
            frozen: None,
            steps: 0,
            update_indices: Vec::new(),
        };
        ev.check_cutoff();
        ev
    }

    pub fn for_instance(rule: &RuleSpec, instance: &Instance) -> Self {
        Self::new(rule, instance.agents().iter().copied())
    }

    fn param_now(&self, param: super::DynamicParam) -> u64 {
        use super::DynamicParam::*;
        match param {
            SolutionSize => self.solution.len() as u64,
            NumUpdates => self.update_indices.len() as u64,
            other => other.live_value(&self.tally).expect("log-only parameter"),
        }
    }

    fn check_cutoff(&mut self) {
        if let Dynamizer::Harsh { param, cutoff } = self.rule.dynamizer {
            if self.frozen.is_none() && self.param_now(param) >= cutoff {
                self.frozen = Some(self.scores.clone());
            }
        }
    }

    /// Applies one event; returns whether the solution changed.
    pub fn step(&mut self, e: &Event) -> bool {
        // Rule-relative values over events 1..i-1, taken before the event lands.
        let prior = self.rule.dynamizer.param().map(|p| self.param_now(p));

        self.tally.apply(e);
        self.steps += 1;
        let n = self.tally.num_paragraphs();

        self.scores = match &self.frozen {
            Some(frozen) => (0..n)
                .map(|j| frozen.get(j).copied().unwrap_or_else(S::zero))
                .collect(),
            None => {
                let raw = self
                    .rule
                    .kernel
                    .score_live::<S>(&self.tally, self.rule.weight_mode);
                match self.rule.dynamizer {
                    Dynamizer::Smooth { param, alpha } => {
                        let t = if param.is_rule_relative() {
                            prior.expect("smooth rules carry a parameter")
                        } else {
                            param.live_value(&self.tally).expect("log-only parameter")
                        };
                        let alpha = S::from_f64(alpha);
                        raw.into_iter()
                            .map(|x| f_exp_unchecked(x, t, alpha))
                            .collect()
                    }
                    _ => raw,
                }
            }
        };

        let next: Solution = self
            .tally
            .paragraph_ids()
            .iter()
            .zip(&self.scores)
            .filter(|(_, s)| **s >= self.threshold)
            .map(|(p, _)| *p)
            .collect();
        let changed = self.steps > 1 && next != self.solution;
        if changed {
            self.update_indices.push(self.steps - 1);
        }
        self.solution = next;
        self.check_cutoff();
        changed
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn score(&self, p: ParagraphId) -> Option<S> {
        self.tally.paragraph_index(p).map(|j| self.scores[j])
    }

    pub fn scores(&self) -> impl Iterator<Item = (ParagraphId, S)> + '_ {
        self.tally
            .paragraph_ids()
            .iter()
            .copied()
            .zip(self.scores.iter().copied())
    }

    pub fn tally(&self) -> &LiveTally {
        &self.tally
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn updates(&self) -> usize {
        self.update_indices.len()
    }

    pub fn update_indices(&self) -> &[usize] {
        &self.update_indices
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen.is_some()
    }

    pub fn rule(&self) -> &RuleSpec {
        &self.rule
    }
}

/// `R*` for every prefix of the instance's log.
pub fn ccr_trajectory(rule: &RuleSpec, instance: &Instance) -> Trajectory {
    let mut ev = RuleEvaluator::<f64>::for_instance(rule, instance);
    let mut prefix_solutions = Vec::with_capacity(instance.log().len());
    for e in instance.log() {
        ev.step(e);
        prefix_solutions.push(ev.solution().clone());
    }
    Trajectory {
        prefix_solutions,
        update_indices: ev.update_indices,
    }
}

/// Scores of every paragraph in `P(E)` on the full log.
///
/// Rules whose parameter depends only on the log are evaluated directly from
/// the batch tally (no prefix walk); rule-relative ones replay the log.
fn dynamic_scores<S: Scalar>(rule: &RuleSpec, instance: &Instance) -> Result<BTreeMap<ParagraphId, S>, RuleError> {
    if rule.is_rule_relative() {
        let mut ev = RuleEvaluator::<S>::for_instance(rule, instance);
        for e in instance.log() {
            ev.step(e);
        }
        return Ok(ev.scores().collect());
    }
    let kernel = &rule.kernel;
    let mode = rule.weight_mode;
    Ok(match rule.dynamizer {
        Dynamizer::None => static_scores::<S>(kernel, instance, mode),
        Dynamizer::Harsh { param, cutoff } => {
            let j = harsh_prefix(instance, param, cutoff, None)?;
            let at_cutoff = static_scores::<S>(kernel, &instance.prefix(j), mode);
            instance
                .log()
                .paragraphs()
                .iter()
                .map(|&p| (p, at_cutoff.get(&p).copied().unwrap_or_else(S::zero)))
                .collect()
        }
        Dynamizer::Smooth { param, alpha } => {
            let t = param_value(param, instance, None)?;
            let alpha = S::from_f64(alpha);
            static_scores::<S>(kernel, instance, mode)
                .into_iter()
                .map(|(p, x)| (p, f_exp_unchecked(x, t, alpha)))
                .collect()
        }
    })
}

pub fn dynamic_score<S: Scalar>(rule: &RuleSpec, paragraph: ParagraphId, instance: &Instance) -> Result<S, RuleError> {
    if !instance.log().contains_paragraph(paragraph) {
        return Err(RuleError::UnknownParagraph(paragraph));
    }
    Ok(dynamic_scores::<S>(rule, instance)?[&paragraph])
}

/// `{ p ∈ P(E) : CSF(p, T) ≥ x }`.
pub fn ccr_solution<S: Scalar>(rule: &RuleSpec, instance: &Instance) -> Solution {
    let x = S::from_f64(rule.threshold);
    dynamic_scores::<S>(rule, instance)
        .expect("log-only parameters need no rule")
        .into_iter()
        .filter(|(_, s)| *s >= x)
        .map(|(p, _)| p)
        .collect()
}
