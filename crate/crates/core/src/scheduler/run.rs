use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::{AgentPolicy, Decision, SimError};
use crate::model::{AgentId, Instance, ModelError, ParagraphId, VoteValue};
use crate::populations::{AgentAction, AgentView, Payload, SimRng};
use crate::rules::{RuleEvaluator, RuleSpec, Solution, Trajectory};
use crate::welfare::{normalized_satisfaction_live, stability_metric, MetricPoint};

#[derive(Clone, Debug, Default, PartialEq)]
pub enum Selection {
    /// Each turn goes to an agent drawn uniformly at random.
    #[default]
    Uniform,
    /// Turn `k` goes to the `k`-th listed agent; the run ends when the list
    /// does.
    Scripted(Vec<AgentId>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n_events: usize,
    pub seed: u64,
    pub selection: Selection,
    /// Stop after this many consecutive events without a document update.
    pub convergence_window: Option<usize>,
    /// Cap on scheduler turns, skipped ones included. Defaults to
    /// `10 · n_events`.
    pub max_iterations: Option<usize>,
}

impl SimConfig {
    pub fn new(n_events: usize, seed: u64) -> Self {
        SimConfig {
            n_events,
            seed,
            selection: Selection::Uniform,
            convergence_window: None,
            max_iterations: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_events == 0 {
            return Err(SimError::Config("n_events must be at least 1".into()));
        }
        if self.convergence_window == Some(0) {
            return Err(SimError::Config("convergence window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Metrics after each applied event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrefixMetrics {
    pub event: usize,
    pub satisfaction: f64,
    pub updates: usize,
    pub solution_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkipRecord {
    pub iteration: usize,
    pub agent: AgentId,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub rule: RuleSpec,
    pub seed: u64,
    pub instance: Instance,
    pub trajectory: Trajectory,
    pub series: Vec<PrefixMetrics>,
    pub point: MetricPoint,
    pub payloads: BTreeMap<ParagraphId, Payload>,
    pub skipped: Vec<SkipRecord>,
    pub iterations: usize,
}

impl RunResult {
    pub fn solution(&self) -> Solution {
        self.trajectory.last().cloned().unwrap_or_default()
    }
}

pub fn run_simulation(
    config: &SimConfig,
    agents: &[AgentId],
    policy: &mut dyn AgentPolicy,
    rule: &RuleSpec,
) -> Result<RunResult, SimError> {
    config.validate()?;
    rule.validate().map_err(|e| SimError::Config(e.to_string()))?;
    if agents.is_empty() {
        return Err(SimError::Config("no agents".into()));
    }
    let mut rng = SimRng::seed_from_u64(config.seed);
    let mut instance = Instance::new(agents.iter().copied().collect(), Default::default())?;
    let mut eval = RuleEvaluator::<f64>::for_instance(rule, &instance);
    let mut payloads: BTreeMap<ParagraphId, Payload> = BTreeMap::new();
    let mut prefix_solutions = Vec::with_capacity(config.n_events);
    let mut series = Vec::with_capacity(config.n_events);
    let mut skipped = Vec::new();
    let max_iterations = config.max_iterations.unwrap_or(config.n_events.saturating_mul(10));
    let mut iterations = 0;
    let mut quiet = 0;

    while instance.log().len() < config.n_events && iterations < max_iterations {
        let agent = match &config.selection {
            Selection::Uniform => agents[rng.random_range(0..agents.len())],
            Selection::Scripted(order) => match order.get(iterations) {
                Some(&a) => a,
                None => break,
            },
        };
        iterations += 1;
        let view = AgentView::build(agent, eval.tally(), eval.solution(), &payloads);
        let action = match policy.decide(&view, &mut rng) {
            Ok(Decision::Act(a)) => a,
            Ok(Decision::Skip(reason)) => {
                log::debug!("turn {iterations}: {agent} skipped: {reason}");
                skipped.push(SkipRecord {
                    iteration: iterations,
                    agent,
                    reason,
                });
                continue;
            }
            Err(source) => {
                return Err(SimError::Policy {
                    iteration: iterations,
                    source,
                })
            }
        };
        let rejected = |source| SimError::Action {
            iteration: iterations,
            source,
        };
        let (paragraph, value) = match action {
            AgentAction::Propose(payload) => {
                let p = instance.log().next_paragraph_id();
                payloads.insert(p, payload);
                (p, VoteValue::Approve)
            }
            AgentAction::Vote(p, v) => {
                if !instance.log().contains_paragraph(p) {
                    return Err(rejected(ModelError::UnknownParagraph(p)));
                }
                (p, v)
            }
        };
        let event = *instance.push(agent, paragraph, value).map_err(rejected)?;
        let changed = eval.step(&event);
        prefix_solutions.push(eval.solution().clone());
        series.push(PrefixMetrics {
            event: event.seq,
            satisfaction: normalized_satisfaction_live(eval.tally(), eval.solution(), rule.weight_mode),
            updates: eval.updates(),
            solution_size: eval.solution().len(),
        });
        quiet = if changed { 0 } else { quiet + 1 };
        if config.convergence_window.is_some_and(|m| quiet >= m) {
            break;
        }
    }

    let trajectory = Trajectory {
        prefix_solutions,
        update_indices: eval.update_indices().to_vec(),
    };
    let last = series
        .last()
        .copied()
        .ok_or_else(|| SimError::Config(format!("no event was applied in {iterations} turns")))?;
    let point = MetricPoint {
        rule: rule.id(),
        repetition: None,
        events: instance.log().len(),
        satisfaction: last.satisfaction,
        stability: stability_metric(&trajectory).expect("nonempty trajectory"),
        solution_size: last.solution_size as f64,
    };
    Ok(RunResult {
        rule: *rule,
        seed: config.seed,
        instance,
        trajectory,
        series,
        point,
        payloads,
        skipped,
        iterations,
    })
}

/// Recomputes the trajectory and metrics of a stored log, exactly as the
/// simulator recorded them while the log was being written.
pub fn replay(instance: &Instance, rule: &RuleSpec) -> Result<RunResult, SimError> {
    rule.validate().map_err(|e| SimError::Config(e.to_string()))?;
    if instance.log().is_empty() {
        return Err(SimError::Config("cannot replay an empty log".into()));
    }
    let mut eval = RuleEvaluator::<f64>::for_instance(rule, instance);
    let mut prefix_solutions = Vec::with_capacity(instance.log().len());
    let mut series = Vec::with_capacity(instance.log().len());
    for e in instance.log() {
        eval.step(e);
        prefix_solutions.push(eval.solution().clone());
        series.push(PrefixMetrics {
            event: e.seq,
            satisfaction: normalized_satisfaction_live(eval.tally(), eval.solution(), rule.weight_mode),
            updates: eval.updates(),
            solution_size: eval.solution().len(),
        });
    }
    let trajectory = Trajectory {
        prefix_solutions,
        update_indices: eval.update_indices().to_vec(),
    };
    let last = *series.last().expect("nonempty log");
    let point = MetricPoint {
        rule: rule.id(),
        repetition: None,
        events: instance.log().len(),
        satisfaction: last.satisfaction,
        stability: stability_metric(&trajectory).expect("nonempty trajectory"),
        solution_size: last.solution_size as f64,
    };
    Ok(RunResult {
        rule: *rule,
        seed: 0,
        instance: instance.clone(),
        trajectory,
        series,
        point,
        payloads: BTreeMap::new(),
        skipped: Vec::new(),
        iterations: instance.log().len(),
    })
}
