use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "ccr", version, about = "Simulate and analyse consensus-conditioned document rules")]
pub struct Cli {
    /// TOML file with defaults for the run options; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one rule on one population and write the run artifacts.
    Simulate(RunArgs),
    /// Run a grid of rules over several repetitions and aggregate.
    Sweep(SweepArgs),
    /// Merge metric tables and flag the dominated rules.
    Pareto(ParetoArgs),
    /// Run the property suites.
    Verify(VerifyArgs),
    /// Recompute trajectory and metrics from a stored event log.
    Replay(ReplayArgs),
}

#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// Rule as `kernel|dynamizer|threshold|mode`; repeatable for sweeps.
    #[arg(long = "rule")]
    pub rules: Vec<String>,
    /// `unstructured`, `euclidean[:distribution]` or `llm`.
    #[arg(long)]
    pub population: Option<String>,
    #[arg(long)]
    pub agents: Option<u32>,
    #[arg(long)]
    pub events: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Interval width for Euclidean agents.
    #[arg(long)]
    pub width: Option<f64>,
    /// Stop after this many consecutive events without a document change.
    #[arg(long)]
    pub convergence_window: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Output directory.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub llm: LlmArgs,
}

#[derive(Debug, Default, Clone, Args)]
pub struct LlmArgs {
    /// Answer with the offline deterministic gateway instead of the endpoint.
    #[arg(long)]
    pub mock_llm: bool,
    #[arg(long)]
    pub llm_model: Option<String>,
    #[arg(long)]
    pub llm_base_url: Option<String>,
    #[arg(long)]
    pub llm_temperature: Option<f64>,
    #[arg(long)]
    pub topic: Option<String>,
    /// `uniform` or `counts:r/m/b/s/p` (resistant … proactive).
    #[arg(long)]
    pub sentiment: Option<String>,
    /// CSV `sex,age_group,education,count`; defaults to the bundled sample.
    #[arg(long)]
    pub demographics: Option<PathBuf>,
    /// JSON proposal corpus; defaults to the bundled sample.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Named rule grid (`standard`, `full`, `static`) used when no --rule is given.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Concurrent runs; defaults to every core.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Also write every run's artifacts under `<out>/runs/`.
    #[arg(long)]
    pub keep_runs: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ParetoArgs {
    /// Metric CSVs (`rule,repetition,events,satisfaction,stability,solution_size`).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output CSV; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Comma-separated suites to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Cases per suite, overriding each suite's default.
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_agents: Option<u32>,
    #[arg(long)]
    pub max_paragraphs: Option<u32>,
    #[arg(long)]
    pub max_events: Option<usize>,
    /// Swap in a deliberately broken RM (`raw-count-tie`) to check the suites bite.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// A run directory written by `simulate`; its stored metrics are checked.
    pub run_dir: Option<PathBuf>,
    /// Event log to replay (default: `<run_dir>/events.log`).
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Rule to replay under (default: the one recorded in the run directory).
    #[arg(long)]
    pub rule: Option<String>,
    /// Community size (default: recorded, else the largest agent id in the log).
    #[arg(long)]
    pub agents: Option<u32>,
    /// Write the recomputed metrics and series here.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}
