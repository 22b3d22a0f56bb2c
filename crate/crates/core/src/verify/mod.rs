//! Randomized property suites for the rules and welfare code.
//!
//! Each suite draws small random instances from a seeded generator, checks
//! one property, and on failure shrinks the offending input before
//! reporting it. The RM implementation under test is injectable so the
//! suites themselves can be checked against a deliberately broken variant.

mod gen;
mod shrink;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub use self::gen::{random_instance, random_log, InstanceBounds};
pub use self::shrink::shrink_instance;

use crate::model::{
    stance_of, tally_of, undo_list, write_event_log, AgentId, EventLog, Instance, ParagraphId, VoteValue, WeightMode,
};
use crate::populations::SimRng;
use crate::rules::{
    ccr_solution, ccr_trajectory, f_exp, rm_solution, sentinel_rule, DynamicParam, RuleSpec, Solution, StaticKernel,
    TieBreak,
};
use crate::welfare::{community_by_paragraph, destabilizing_extension, swm_oracle, Direction};
use crate::{Exact, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    /// RM reaches the exhaustive welfare optimum.
    Swm,
    /// The constructed extension pushes every RM-included paragraph out.
    Destabilize,
    /// Undoing a log and replaying another leaves only the second's stance,
    /// and static kernels cannot tell the two instances apart.
    StanceReset,
    /// The sentinel rule realizes any target set and never moves afterwards.
    Sentinel,
    /// Monotonicity and positivity of the exponential smoother.
    Smoothing,
    /// Harsh rules stop updating once the cutoff is reached.
    Harsh,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Swm,
        Suite::Destabilize,
        Suite::StanceReset,
        Suite::Sentinel,
        Suite::Smoothing,
        Suite::Harsh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Swm => "swm",
            Suite::Destabilize => "destabilize",
            Suite::StanceReset => "stance-reset",
            Suite::Sentinel => "sentinel",
            Suite::Smoothing => "smoothing",
            Suite::Harsh => "harsh",
        }
    }

    /// Random cases drawn when no count is configured.
    pub fn default_cases(self) -> usize {
        match self {
            Suite::Swm => 1000,
            Suite::Destabilize | Suite::StanceReset | Suite::Harsh => 200,
            Suite::Sentinel => 100,
            // grid size is fixed
            Suite::Smoothing => 0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == key)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite {s:?} (expected one of {})", names.join(", "))
            })
    }
}

/// An RM implementation: instance and weighting in, solution out.
pub type RmFn = fn(&Instance, WeightMode) -> Solution;

/// The library's RM with exact tie detection.
pub fn reference_rm(instance: &Instance, mode: WeightMode) -> Solution {
    rm_solution::<Exact>(instance, mode, TieBreak::ExcludeOnTie)
}

/// A broken RM that calls a tie whenever the raw counts match, ignoring
/// the relative weights. Only useful for checking that the suites bite.
pub fn raw_count_tie_rm(instance: &Instance, mode: WeightMode) -> Solution {
    tally_of::<Exact>(instance, mode)
        .paragraphs()
        .filter(|(_, t)| t.plus != t.minus && t.plus_rel > t.minus_rel)
        .map(|(p, _)| p)
        .collect()
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Overrides every suite's default case count.
    pub cases: Option<usize>,
    pub suites: Vec<Suite>,
    pub bounds: InstanceBounds,
    pub rm: RmFn,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            cases: None,
            suites: Suite::ALL.to_vec(),
            bounds: InstanceBounds::default(),
            rm: reference_rm,
        }
    }
}

impl VerifyConfig {
    pub fn only(mut self, suites: &[Suite]) -> Self {
        self.suites = suites.to_vec();
        self
    }

    fn cases_for(&self, suite: Suite) -> usize {
        self.cases.unwrap_or_else(|| suite.default_cases())
    }

    fn rng_for(&self, suite: Suite) -> SimRng {
        SimRng::seed_from_u64(self.seed ^ (suite as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// A falsifying input, already minimized.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub summary: String,
    pub instance: Option<Instance>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary)?;
        if let Some(inst) = &self.instance {
            let agents: Vec<String> = inst.agents().iter().map(|a| a.to_string()).collect();
            writeln!(f, "agents: {}", agents.join(" "))?;
            let mut buf = Vec::new();
            write_event_log(inst.log(), &mut buf).map_err(|_| fmt::Error)?;
            f.write_str(&String::from_utf8_lossy(&buf))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub elapsed: Duration,
    pub counterexample: Option<Counterexample>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok" } else { "FALSIFIED" };
        writeln!(
            f,
            "{:<13} {:<9} {} cases in {:.2?}",
            self.suite.name(),
            verdict,
            self.cases,
            self.elapsed
        )?;
        if let Some(cx) = &self.counterexample {
            for line in cx.to_string().lines() {
                writeln!(f, "    {line}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn get(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|r| r.suite == suite)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.suites {
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

pub fn run_verify(config: &VerifyConfig) -> VerifyReport {
    VerifyReport {
        suites: config.suites.iter().map(|&s| run_suite(s, config)).collect(),
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut rng = config.rng_for(suite);
    let n = config.cases_for(suite);
    let (cases, counterexample) = match suite {
        Suite::Swm => run_cases(n, |_| swm_case(&mut rng, config)),
        Suite::Destabilize => run_cases(n, |_| destabilize_case(&mut rng, config)),
        Suite::StanceReset => run_cases(n, |_| stance_reset_case(&mut rng, config)),
        Suite::Sentinel => run_cases(n, |_| sentinel_case(&mut rng)),
        Suite::Harsh => run_cases(n, |_| harsh_case(&mut rng, config)),
        Suite::Smoothing => smoothing_grid(),
    };
    SuiteReport {
        suite,
        cases,
        elapsed: start.elapsed(),
        counterexample,
    }
}

fn run_cases(n: usize, mut case: impl FnMut(usize) -> Option<Counterexample>) -> (usize, Option<Counterexample>) {
    for k in 0..n {
        if let Some(cx) = case(k) {
            return (k + 1, Some(cx));
        }
    }
    (n, None)
}

const MODES: [WeightMode; 2] = [WeightMode::CurrentStance, WeightMode::EverVoted];

/// Gap between the welfare optimum and RM's welfare, if RM falls short.
fn swm_gap(inst: &Instance, mode: WeightMode, rm: RmFn) -> Option<(Solution, f64, Solution, f64)> {
    let sol = rm(inst, mode);
    let got = community_by_paragraph::<f64>(inst, &sol, mode);
    let optima = swm_oracle::<f64>(inst, mode).expect("generator stays under the oracle cap");
    let best_sol = optima.into_iter().next().unwrap_or_default();
    let best = community_by_paragraph::<f64>(inst, &best_sol, mode);
    (!got.approx_eq(best)).then_some((sol, got, best_sol, best))
}

fn swm_case(rng: &mut SimRng, config: &VerifyConfig) -> Option<Counterexample> {
    let inst = random_instance(rng, &config.bounds);
    for mode in MODES {
        if swm_gap(&inst, mode, config.rm).is_some() {
            let small = shrink_instance(&inst, &|i| swm_gap(i, mode, config.rm).is_some());
            let (sol, got, best_sol, best) = swm_gap(&small, mode, config.rm).expect("still failing");
            return Some(Counterexample {
                summary: format!(
                    "[{mode}] RM picks {sol} with welfare {got:.6}; {best_sol} reaches {best:.6}"
                ),
                instance: Some(small),
            });
        }
    }
    None
}

/// A paragraph RM includes that survives its own destabilizing extension.
fn survivor(inst: &Instance, mode: WeightMode, rm: RmFn) -> Option<ParagraphId> {
    rm(inst, mode).iter().find(|&p| {
        let ext = destabilizing_extension(inst, p, Direction::Out).expect("paragraph is in the log");
        let after = ext.apply(inst).expect("fresh agents vote on an existing paragraph");
        rm(&after, mode).contains(p)
    })
}

fn destabilize_case(rng: &mut SimRng, config: &VerifyConfig) -> Option<Counterexample> {
    let inst = random_instance(rng, &config.bounds);
    for mode in MODES {
        if survivor(&inst, mode, config.rm).is_some() {
            let small = shrink_instance(&inst, &|i| survivor(i, mode, config.rm).is_some());
            let p = survivor(&small, mode, config.rm).expect("still failing");
            return Some(Counterexample {
                summary: format!("[{mode}] {p} stays in after its destabilizing extension"),
                instance: Some(small),
            });
        }
    }
    None
}

fn reset_then(first: &EventLog, second: &EventLog) -> EventLog {
    let mut log = first.clone();
    for (a, p, v) in undo_list(first) {
        log.push(a, p, v).expect("abstain on an existing paragraph");
    }
    log.concat(second).expect("second log is valid on its own")
}

fn grid_rules() -> Vec<RuleSpec> {
    StaticKernel::grid_kernels()
        .into_iter()
        .map(|k| RuleSpec::new(k, 0.5).with_mode(WeightMode::CurrentStance))
        .collect()
}

/// What distinguishes `first + undo + second` from `second` alone, if anything.
fn reset_difference(n: u32, first: &EventLog, second: &EventLog) -> Option<String> {
    let a = Instance::with_agents(n, reset_then(first, second)).expect("agents 1..=n");
    let b = Instance::with_agents(n, second.clone()).expect("agents 1..=n");
    let sa: Vec<_> = stance_of(&a).nonzero().collect();
    let sb: Vec<_> = stance_of(&b).nonzero().collect();
    if sa != sb {
        return Some("stance matrices differ".into());
    }
    grid_rules().into_iter().find_map(|rule| {
        let (x, y) = (ccr_solution::<f64>(&rule, &a), ccr_solution::<f64>(&rule, &b));
        (x != y).then(|| format!("{rule}: {x} after reset vs {y}"))
    })
}

fn stance_reset_case(rng: &mut SimRng, config: &VerifyConfig) -> Option<Counterexample> {
    let b = &config.bounds;
    let n = rng.random_range(1..=b.max_agents.max(1));
    let (l1, l2) = (rng.random_range(0..=b.max_events), rng.random_range(0..=b.max_events));
    let first = random_log(rng, n, b, l1);
    let second = random_log(rng, n, b, l2);
    reset_difference(n, &first, &second)?;
    let prefix = Instance::with_agents(n, first.clone()).expect("agents 1..=n");
    let small = shrink_instance(&prefix, &|i| reset_difference(n, i.log(), &second).is_some());
    let why = reset_difference(n, small.log(), &second).expect("still failing");
    Some(Counterexample {
        summary: format!("{why}; first log shown, second log has {} events", second.len()),
        instance: Some(small),
    })
}

/// Builds a log on which the sentinel rule outputs exactly `targets`:
/// propose the sentinel, then the targets, then abstain on the sentinel,
/// then propose the rest.
fn sentinel_log<R: Rng + ?Sized>(
    rng: &mut R,
    agents: u32,
    sentinel: ParagraphId,
    targets: &[ParagraphId],
    others: &[ParagraphId],
) -> EventLog {
    let pick = |rng: &mut R| AgentId(rng.random_range(1..=agents));
    let mut log = EventLog::new();
    log.push(pick(rng), sentinel, VoteValue::Approve).expect("fresh");
    for &p in targets {
        log.push(pick(rng), p, VoteValue::Approve).expect("fresh");
    }
    log.push(pick(rng), sentinel, VoteValue::Abstain).expect("sentinel exists");
    for &p in others {
        log.push(pick(rng), p, VoteValue::Approve).expect("fresh");
    }
    log
}

fn sentinel_case(rng: &mut SimRng) -> Option<Counterexample> {
    let agents = rng.random_range(1..=6u32);
    let sentinel = ParagraphId(1);
    let k = rng.random_range(1..=10u32);
    let mut pool: Vec<ParagraphId> = (2..=k + 1).map(ParagraphId).collect();
    pool.shuffle(rng);
    let cut = rng.random_range(0..=pool.len());
    let (targets, others) = pool.split_at(cut);
    let log = sentinel_log(rng, agents, sentinel, targets, others);
    let want: Solution = targets.iter().copied().collect();
    let got = sentinel_rule(&log, sentinel);
    let inst = |log: EventLog| Instance::with_agents(agents, log).expect("agents 1..=n");
    if got != want {
        return Some(Counterexample {
            summary: format!("target {want} but the constructed log yields {got}"),
            instance: Some(inst(log)),
        });
    }

    // Arbitrary continuation, sentinel included.
    let extra = rng.random_range(0..=200usize);
    let mut cont = log.clone();
    for _ in 0..extra {
        let a = AgentId(rng.random_range(1..=agents));
        let next = cont.next_paragraph_id();
        if rng.random_bool(0.2) {
            cont.push(a, next, VoteValue::Approve).expect("fresh");
        } else {
            let p = ParagraphId(rng.random_range(1..next.0));
            let v = [VoteValue::Approve, VoteValue::Abstain, VoteValue::Disapprove][rng.random_range(0..3)];
            cont.push(a, p, v).expect("existing");
        }
        let now = sentinel_rule(&cont, sentinel);
        if now != want {
            return Some(Counterexample {
                summary: format!("output moved from {want} to {now} after the sentinel"),
                instance: Some(inst(cont)),
            });
        }
    }
    None
}

/// First grid point violating monotonicity or positivity of `F_exp`.
fn smoothing_grid() -> (usize, Option<Counterexample>) {
    let steps: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    let f = |x: f64, t: u64, a: f64| f_exp(x, t, a).expect("grid stays in [0, 1]");
    let mut checked = 0;
    let fail = |summary: String| {
        Some(Counterexample {
            summary,
            instance: None,
        })
    };
    for (xi, &x) in steps.iter().enumerate() {
        for (ai, &a) in steps.iter().enumerate() {
            for t in 0..=200u64 {
                checked += 1;
                let v = f(x, t, a);
                if x > 0.0 && v <= 0.0 {
                    return (checked, fail(format!("F({x}, {t}, {a}) = {v} is not positive")));
                }
                if t > 0 && v > f(x, t - 1, a) {
                    return (checked, fail(format!("F({x}, t, {a}) increases from t={} to t={t}", t - 1)));
                }
                if ai > 0 && v > f(x, t, steps[ai - 1]) {
                    return (checked, fail(format!("F({x}, {t}, α) increases at α={a}")));
                }
                if xi > 0 && v < f(steps[xi - 1], t, a) {
                    return (checked, fail(format!("F(x, {t}, {a}) decreases at x={x}")));
                }
            }
        }
    }
    (checked, None)
}

/// First update at or after the cutoff, for any harsh grid rule.
fn late_update(inst: &Instance) -> Option<String> {
    let n = inst.log().len();
    let cutoffs = [0, n as u64 / 4, n as u64 / 2, 3 * n as u64 / 4];
    for kernel in StaticKernel::grid_kernels() {
        for t in cutoffs {
            let rule = RuleSpec::new(kernel, 0.5).harsh(DynamicParam::NumEvents, t);
            let traj = ccr_trajectory(&rule, inst);
            if let Some(i) = traj.update_indices.iter().find(|&&i| i as u64 >= t.max(1)) {
                return Some(format!("{rule}: update at index {i} with cutoff {t}"));
            }
            let stability = (n - traj.updates()) as f64;
            if n > 0 && stability < n as f64 - t as f64 {
                return Some(format!("{rule}: {} updates exceed cutoff {t}", traj.updates()));
            }
        }
    }
    None
}

fn harsh_case(rng: &mut SimRng, config: &VerifyConfig) -> Option<Counterexample> {
    let inst = random_instance(rng, &config.bounds);
    late_update(&inst)?;
    let small = shrink_instance(&inst, &|i| late_update(i).is_some());
    Some(Counterexample {
        summary: late_update(&small).expect("still failing"),
        instance: Some(small),
    })
}
