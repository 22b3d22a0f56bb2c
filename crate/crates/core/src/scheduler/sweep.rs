use rayon::prelude::*;

use super::{run_simulation, AgentPolicy, RunResult, SimConfig, SimError};
use crate::model::AgentId;
use crate::rules::RuleSpec;
use crate::welfare::{mean_by_rule, pareto_front, MetricPoint};

/// Builds the population for one repetition: the agent list and a fresh
/// policy. Called once per run, with the repetition index and its seed.
pub type PolicyFactory<'a> =
    dyn Fn(usize, u64) -> Result<(Vec<AgentId>, Box<dyn AgentPolicy>), SimError> + Send + Sync + 'a;

pub struct SweepConfig {
    pub rules: Vec<RuleSpec>,
    pub repetitions: usize,
    pub sim: SimConfig,
    /// Upper bound on concurrent runs; `None` uses every core.
    pub parallelism: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunFailure {
    pub rule: String,
    pub repetition: usize,
    pub error: String,
}

#[derive(Debug, Default)]
pub struct SweepResult {
    /// One point per completed run, ordered by rule then repetition.
    pub runs: Vec<MetricPoint>,
    pub failures: Vec<RunFailure>,
    /// Per-rule means over completed runs.
    pub aggregated: Vec<MetricPoint>,
    pub front: Vec<MetricPoint>,
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    bytes.into_iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// `seed ⊕ FNV-1a(rule id, repetition)`.
pub fn derive_seed(seed: u64, rule_id: &str, repetition: usize) -> u64 {
    let bytes = rule_id
        .bytes()
        .chain([0u8])
        .chain((repetition as u64).to_le_bytes());
    seed ^ fnv1a(bytes)
}

/// Seed of a repetition's population, shared by every rule.
pub(crate) fn population_seed(seed: u64, repetition: usize) -> u64 {
    derive_seed(seed, "", repetition)
}

/// Runs every rule × repetition; returns full results through `keep` and
/// the metric table. Failed runs are recorded and left out of the means.
pub fn sweep(
    config: &SweepConfig,
    factory: &PolicyFactory<'_>,
    keep: &(dyn Fn(&RunResult, usize) -> Result<(), SimError> + Sync),
) -> Result<SweepResult, SimError> {
    config.sim.validate()?;
    if config.rules.is_empty() {
        return Err(SimError::Config("no rules to sweep".into()));
    }
    if config.repetitions == 0 {
        return Err(SimError::Config("repetitions must be at least 1".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..config.rules.len())
        .flat_map(|r| (0..config.repetitions).map(move |k| (r, k)))
        .collect();
    let run_one = |&(r, k): &(usize, usize)| -> Result<MetricPoint, RunFailure> {
        let rule = &config.rules[r];
        let id = rule.id();
        let fail = |e: SimError| RunFailure {
            rule: id.clone(),
            repetition: k,
            error: e.to_string(),
        };
        let (agents, mut policy) = factory(k, population_seed(config.sim.seed, k)).map_err(fail)?;
        let sim = SimConfig {
            seed: derive_seed(config.sim.seed, &id, k),
            ..config.sim.clone()
        };
        let result = run_simulation(&sim, &agents, policy.as_mut(), rule).map_err(fail)?;
        keep(&result, k).map_err(fail)?;
        Ok(MetricPoint {
            repetition: Some(k),
            ..result.point
        })
    };
    let outcomes: Vec<Result<MetricPoint, RunFailure>> = match config.parallelism {
        Some(1) => jobs.iter().map(run_one).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Config(e.to_string()))?
            .install(|| jobs.par_iter().map(run_one).collect()),
        None => jobs.par_iter().map(run_one).collect(),
    };

    let mut out = SweepResult::default();
    for o in outcomes {
        match o {
            Ok(p) => out.runs.push(p),
            Err(f) => {
                log::warn!("run {} #{} failed: {}", f.rule, f.repetition, f.error);
                out.failures.push(f);
            }
        }
    }
    if !out.failures.is_empty() {
        log::warn!(
            "{} of {} runs failed; aggregating over the rest",
            out.failures.len(),
            jobs.len()
        );
    }
    out.aggregated = mean_by_rule(&out.runs);
    out.front = pareto_front(&out.aggregated);
    Ok(out)
}
