use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ccr_core::model::{read_event_log, Instance};
use ccr_core::populations::{AgentView, SimRng};
use ccr_core::scheduler::{
    read_metrics, replay, run_simulation, sweep, write_metrics, write_run_artifacts, write_series, AgentPolicy,
    Decision, SimConfig, SweepConfig,
};
use ccr_core::verify::{raw_count_tie_rm, run_verify, InstanceBounds, Suite, VerifyConfig};
use ccr_core::welfare::{dominates, mean_by_rule, MetricPoint};
use serde::Serialize;

use crate::args::{Cli, Command, ParetoArgs, ReplayArgs, RunArgs, SweepArgs, VerifyArgs};
use crate::config::{parse_rule, resolve, FileConfig, RunSettings};
use crate::population::Population;
use crate::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Simulate(a) => simulate(&file, a),
        Command::Sweep(a) => run_sweep(&file, a),
        Command::Pareto(a) => pareto(a),
        Command::Verify(a) => verify(a),
        Command::Replay(a) => replay_cmd(a),
    }
}

fn sim_config(s: &RunSettings) -> SimConfig {
    SimConfig {
        convergence_window: s.convergence_window,
        max_iterations: s.max_iterations,
        ..SimConfig::new(s.events, s.seed)
    }
}

fn simulate(file: &FileConfig, args: &RunArgs) -> Result<(), CliError> {
    let settings = resolve(file, args, None)?;
    let population = Population::prepare(&settings)?;
    let rule = settings.rules[0];
    if let Some(dir) = &settings.output {
        fs::create_dir_all(dir)?;
    }
    let audit_log = settings.output.as_ref().map(|d| d.join("llm_audit.jsonl"));
    let (agents, mut policy) = population.build(
        settings.seed,
        audit_log
            .as_deref()
            .filter(|_| population.kind() == crate::population::PopulationKind::Llm),
    )?;
    log::info!(
        "simulating {} with {} {} agents for {} events",
        rule,
        agents.len(),
        population.kind(),
        settings.events
    );
    let result = run_simulation(&sim_config(&settings), &agents, policy.as_mut(), &rule)?;
    if let Some(dir) = &settings.output {
        write_run_artifacts(dir, &result, policy.as_ref())?;
    }
    write_metrics(std::slice::from_ref(&result.point), io::stdout().lock())?;
    Ok(())
}

/// Stand-in policy for writing artifacts of runs whose population is gone.
struct Detached;

impl AgentPolicy for Detached {
    fn decide(&mut self, _: &AgentView, _: &mut SimRng) -> Result<Decision, Box<dyn std::error::Error + Send + Sync>> {
        Err("detached policy cannot act".into())
    }
}

fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect()
}

#[derive(Serialize)]
struct FailureRow<'a> {
    rule: &'a str,
    repetition: usize,
    error: &'a str,
}

fn run_sweep(file: &FileConfig, args: &SweepArgs) -> Result<(), CliError> {
    let settings = resolve(file, &args.run, Some(args))?;
    let population = Population::prepare(&settings)?;
    let config = SweepConfig {
        rules: settings.rules.clone(),
        repetitions: settings.repetitions,
        sim: sim_config(&settings),
        parallelism: settings.parallelism,
    };
    if let Some(dir) = &settings.output {
        fs::create_dir_all(dir)?;
    }
    let runs_dir: Option<PathBuf> = settings.output.as_ref().filter(|_| settings.keep_runs).map(|d| d.join("runs"));
    log::info!(
        "sweeping {} rules x {} repetitions over {} {} agents",
        config.rules.len(),
        config.repetitions,
        settings.agents,
        population.kind()
    );
    let factory = |_rep: usize, seed: u64| population.build(seed, None);
    let keep = |r: &ccr_core::scheduler::RunResult, rep: usize| match &runs_dir {
        Some(d) => write_run_artifacts(&d.join(format!("{}-{rep}", file_safe(&r.rule.id()))), r, &Detached),
        None => Ok(()),
    };
    let result = sweep(&config, &factory, &keep)?;
    if result.runs.is_empty() {
        let first = result.failures.first().map(|f| f.error.as_str()).unwrap_or("no runs");
        return Err(CliError::Runtime(format!("every run failed; first error: {first}")));
    }
    match &settings.output {
        Some(dir) => {
            write_metrics(&result.runs, File::create(dir.join("runs.csv"))?)?;
            write_metrics(&result.aggregated, File::create(dir.join("aggregated.csv"))?)?;
            write_metrics(&result.front, File::create(dir.join("front.csv"))?)?;
            if !result.failures.is_empty() {
                let mut w = csv::Writer::from_path(dir.join("failures.csv")).map_err(|e| CliError::Runtime(e.to_string()))?;
                for f in &result.failures {
                    w.serialize(FailureRow {
                        rule: &f.rule,
                        repetition: f.repetition,
                        error: &f.error,
                    })
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                }
                w.flush()?;
            }
            println!(
                "{} runs ({} failed), {} rules, {} on the front -> {}",
                result.runs.len(),
                result.failures.len(),
                result.aggregated.len(),
                result.front.len(),
                dir.display()
            );
        }
        None => write_metrics(&result.aggregated, io::stdout().lock())?,
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoRow {
    pub rule: String,
    pub events: usize,
    pub satisfaction: f64,
    pub stability: f64,
    pub solution_size: f64,
    pub dominated: bool,
}

/// Per-rule means of the merged points, each flagged when another rule
/// dominates it; best satisfaction first.
pub fn pareto_table(points: &[MetricPoint]) -> Vec<ParetoRow> {
    let means = mean_by_rule(points);
    let mut rows: Vec<ParetoRow> = means
        .iter()
        .map(|p| ParetoRow {
            rule: p.rule.clone(),
            events: p.events,
            satisfaction: p.satisfaction,
            stability: p.stability,
            solution_size: p.solution_size,
            dominated: means.iter().any(|q| dominates(q, p)),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.satisfaction
            .total_cmp(&a.satisfaction)
            .then(b.stability.total_cmp(&a.stability))
            .then_with(|| a.rule.cmp(&b.rule))
    });
    rows
}

fn pareto(args: &ParetoArgs) -> Result<(), CliError> {
    let mut points = Vec::new();
    for path in &args.inputs {
        let f = File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
        let ps = read_metrics(f).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        points.extend(ps);
    }
    if points.is_empty() {
        return Err(CliError::Schema("no metric rows in the inputs".into()));
    }
    let rows = pareto_table(&points);
    let out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(out);
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let suites: Vec<Suite> = if args.only.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.only
            .iter()
            .map(|s| s.parse().map_err(CliError::Usage))
            .collect::<Result<_, _>>()?
    };
    let defaults = InstanceBounds::default();
    let mut config = VerifyConfig {
        seed: args.seed,
        cases: args.cases,
        bounds: InstanceBounds {
            max_agents: args.max_agents.unwrap_or(defaults.max_agents),
            max_paragraphs: args.max_paragraphs.unwrap_or(defaults.max_paragraphs),
            max_events: args.max_events.unwrap_or(defaults.max_events),
        },
        ..VerifyConfig::default()
    }
    .only(&suites);
    match args.inject_fault.as_deref() {
        None => {}
        Some("raw-count-tie") => config.rm = raw_count_tie_rm,
        Some(other) => return Err(CliError::Usage(format!("unknown fault {other:?}"))),
    }
    let report = run_verify(&config);
    print!("{report}");
    if report.passed() {
        return Ok(());
    }
    let failed: Vec<&str> = report
        .suites
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.suite.name())
        .collect();
    Err(CliError::Verification(format!("falsified: {}", failed.join(", "))))
}

fn read_audit(dir: &Path) -> Result<serde_json::Value, CliError> {
    let text = fs::read_to_string(dir.join("audit.json"))
        .map_err(|e| CliError::Usage(format!("{}: {e}", dir.join("audit.json").display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("audit.json: {e}")))
}

fn replay_cmd(args: &ReplayArgs) -> Result<(), CliError> {
    let audit = match &args.run_dir {
        Some(d) => Some(read_audit(d)?),
        None => None,
    };
    let log_path = match (&args.log, &args.run_dir) {
        (Some(l), _) => l.clone(),
        (None, Some(d)) => d.join("events.log"),
        (None, None) => return Err(CliError::Usage("give a run directory or --log".into())),
    };
    let rule_text = match (&args.rule, &audit) {
        (Some(r), _) => r.clone(),
        (None, Some(a)) => a["rule"]
            .as_str()
            .ok_or_else(|| CliError::Schema("audit.json has no rule".into()))?
            .to_string(),
        (None, None) => return Err(CliError::Usage("no rule given (use --rule)".into())),
    };
    let rule = parse_rule(&rule_text)?;
    let log = read_event_log(&log_path).map_err(|e| CliError::Schema(format!("{}: {e}", log_path.display())))?;
    let n = match (args.agents, audit.as_ref().and_then(|a| a["agents"].as_u64())) {
        (Some(n), _) => n as u32,
        (None, Some(n)) => n as u32,
        (None, None) => log.agents().iter().map(|a| a.0).max().unwrap_or(1),
    };
    let instance = Instance::with_agents(n, log).map_err(|e| CliError::Usage(e.to_string()))?;
    let result = replay(&instance, &rule)?;

    let mut metrics = Vec::new();
    write_metrics(std::slice::from_ref(&result.point), &mut metrics)?;
    let mut series = Vec::new();
    write_series(&result.series, &mut series)?;
    if let Some(out) = &args.out {
        fs::create_dir_all(out)?;
        fs::write(out.join("metrics.csv"), &metrics)?;
        fs::write(out.join("series.csv"), &series)?;
    }
    io::stdout().write_all(&metrics)?;

    // Only a run recorded under the same rule can be compared.
    let same_rule = audit.as_ref().is_some_and(|a| a["rule"].as_str() == Some(rule.id().as_str()));
    if let (Some(dir), true) = (&args.run_dir, same_rule) {
        let mut mismatched = Vec::new();
        for (name, bytes) in [("metrics.csv", &metrics), ("series.csv", &series)] {
            let stored = fs::read(dir.join(name)).map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
            if &stored != bytes {
                mismatched.push(name);
            }
        }
        if !mismatched.is_empty() {
            return Err(CliError::Verification(format!(
                "replay differs from the stored {}",
                mismatched.join(" and ")
            )));
        }
        eprintln!("replay matches the stored metrics and series");
    }
    Ok(())
}
