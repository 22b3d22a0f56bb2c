//! Run options from a TOML file merged with command-line flags.
//!
//! File keys (all optional):
//!
//! ```toml
//! rule = "RAPS||0.5|EVER_VOTED"   # or: rules = [...], or: grid = "standard"
//! population = "euclidean:normal" # unstructured | euclidean[:dist] | llm
//! agents = 20
//! events = 300
//! repetitions = 5
//! seed = 0
//! width = 0.15
//! convergence_window = 50
//! max_iterations = 3000
//! parallelism = 4
//! output = "results"
//! keep_runs = false
//!
//! [llm]
//! mock = true
//! model = "gpt-4o-mini"
//! base_url = "https://api.openai.com/v1"
//! temperature = 0.7
//! topic = "Climate change policy"
//! sentiment = "counts:4/4/1/5/6"
//! demographics = "cells.csv"
//! corpus = "corpus.json"
//! ```

use std::path::{Path, PathBuf};

use ccr_core::populations::DEFAULT_WIDTH;
use ccr_core::rules::{build_rule_grid, GridSpec, RuleSpec};
use ccr_llm::datasets::SentimentDistribution;
use ccr_llm::transport::{DEFAULT_BASE_URL, DEFAULT_MODEL, DEFAULT_TEMPERATURE};
use serde::Deserialize;

use crate::args::{RunArgs, SweepArgs};
use crate::population::PopulationKind;
use crate::CliError;

pub const DEFAULT_AGENTS: u32 = 20;
pub const DEFAULT_EVENTS: usize = 300;
pub const DEFAULT_REPETITIONS: usize = 5;
pub const DEFAULT_TOPIC: &str = "Climate change policy";

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub rule: Option<String>,
    pub rules: Option<Vec<String>>,
    pub grid: Option<String>,
    pub population: Option<String>,
    pub agents: Option<u32>,
    pub events: Option<usize>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub width: Option<f64>,
    pub convergence_window: Option<usize>,
    pub max_iterations: Option<usize>,
    pub parallelism: Option<usize>,
    pub output: Option<PathBuf>,
    pub keep_runs: Option<bool>,
    #[serde(default)]
    pub llm: FileLlm,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileLlm {
    pub mock: Option<bool>,
    pub model: Option<String>,
    pub base_url: Option<String>,
    pub temperature: Option<f64>,
    pub topic: Option<String>,
    pub sentiment: Option<String>,
    pub demographics: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LlmOptions {
    pub mock: bool,
    pub model: String,
    pub base_url: String,
    pub temperature: f64,
    pub topic: String,
    pub sentiment: SentimentDistribution,
    pub demographics: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
}

/// Fully merged options for `simulate` and `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub rules: Vec<RuleSpec>,
    pub population: PopulationKind,
    pub agents: u32,
    pub events: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub width: f64,
    pub convergence_window: Option<usize>,
    pub max_iterations: Option<usize>,
    pub parallelism: Option<usize>,
    pub output: Option<PathBuf>,
    pub keep_runs: bool,
    pub llm: LlmOptions,
}

pub fn parse_rule(s: &str) -> Result<RuleSpec, CliError> {
    s.parse().map_err(|e: ccr_core::rules::RuleError| CliError::Usage(e.to_string()))
}

pub fn parse_grid(name: &str) -> Result<Vec<RuleSpec>, CliError> {
    let spec = match name.trim().to_ascii_lowercase().as_str() {
        "standard" | "default" => GridSpec::standard(),
        "full" => GridSpec::full(),
        "static" => GridSpec::static_only(),
        other => {
            return Err(CliError::Usage(format!(
                "unknown grid {other:?} (expected standard, full or static)"
            )))
        }
    };
    build_rule_grid(&spec).map_err(|e| CliError::Usage(e.to_string()))
}

fn positive<T: PartialOrd + Default + std::fmt::Display>(name: &str, v: T) -> Result<T, CliError> {
    if v <= T::default() {
        return Err(CliError::Usage(format!("{name} must be at least 1 (got {v})")));
    }
    Ok(v)
}

/// Merges flags over file values over defaults. `sweep` is `None` for
/// single runs, which need exactly one rule.
pub fn resolve(file: &FileConfig, run: &RunArgs, sweep: Option<&SweepArgs>) -> Result<RunSettings, CliError> {
    let flag_grid = sweep.and_then(|s| s.grid.as_deref());
    if !run.rules.is_empty() && flag_grid.is_some() {
        return Err(CliError::Usage("give either --rule or --grid, not both".into()));
    }
    if file.rule.is_some() && file.rules.is_some() {
        return Err(CliError::Schema("config sets both `rule` and `rules`".into()));
    }
    let file_rules: Option<Vec<String>> = file.rule.clone().map(|r| vec![r]).or_else(|| file.rules.clone());
    let rules = if !run.rules.is_empty() {
        run.rules.iter().map(|r| parse_rule(r)).collect::<Result<Vec<_>, _>>()?
    } else if let Some(g) = flag_grid {
        parse_grid(g)?
    } else if let Some(rs) = file_rules {
        rs.iter().map(|r| parse_rule(r)).collect::<Result<Vec<_>, _>>()?
    } else if let Some(g) = &file.grid {
        parse_grid(g)?
    } else if sweep.is_some() {
        parse_grid("standard")?
    } else {
        return Err(CliError::Usage("no rule given (use --rule)".into()));
    };
    if sweep.is_none() && rules.len() != 1 {
        return Err(CliError::Usage(format!("simulate takes exactly one rule, got {}", rules.len())));
    }
    if rules.is_empty() {
        return Err(CliError::Usage("rule list is empty".into()));
    }

    let population = match run.population.as_deref().or(file.population.as_deref()) {
        Some(p) => p.parse()?,
        None => PopulationKind::Unstructured,
    };
    let width = run.width.or(file.width).unwrap_or(DEFAULT_WIDTH);
    if !(width > 0.0 && width <= 1.0) {
        return Err(CliError::Usage(format!("width {width} outside (0, 1]")));
    }

    let l = &run.llm;
    let fl = &file.llm;
    let sentiment = match l.sentiment.as_deref().or(fl.sentiment.as_deref()) {
        Some(s) => s.parse().map_err(|e: String| CliError::Usage(format!("sentiment {s:?}: {e}")))?,
        None => SentimentDistribution::default(),
    };
    let temperature = l.llm_temperature.or(fl.temperature).unwrap_or(DEFAULT_TEMPERATURE);
    if !(0.0..=2.0).contains(&temperature) {
        return Err(CliError::Usage(format!("temperature {temperature} outside [0, 2]")));
    }
    let llm = LlmOptions {
        mock: l.mock_llm || fl.mock.unwrap_or(false),
        model: l.llm_model.clone().or(fl.model.clone()).unwrap_or_else(|| DEFAULT_MODEL.into()),
        base_url: l
            .llm_base_url
            .clone()
            .or(fl.base_url.clone())
            .unwrap_or_else(|| DEFAULT_BASE_URL.into()),
        temperature,
        topic: l.topic.clone().or(fl.topic.clone()).unwrap_or_else(|| DEFAULT_TOPIC.into()),
        sentiment,
        demographics: l.demographics.clone().or(fl.demographics.clone()),
        corpus: l.corpus.clone().or(fl.corpus.clone()),
    };

    Ok(RunSettings {
        rules,
        population,
        agents: positive("agents", run.agents.or(file.agents).unwrap_or(DEFAULT_AGENTS))?,
        events: positive("events", run.events.or(file.events).unwrap_or(DEFAULT_EVENTS))?,
        repetitions: positive(
            "repetitions",
            sweep
                .and_then(|s| s.repetitions)
                .or(file.repetitions)
                .unwrap_or(DEFAULT_REPETITIONS),
        )?,
        seed: run.seed.or(file.seed).unwrap_or(0),
        width,
        convergence_window: run.convergence_window.or(file.convergence_window),
        max_iterations: run.max_iterations.or(file.max_iterations),
        parallelism: sweep.and_then(|s| s.parallelism).or(file.parallelism),
        output: run.out.clone().or(file.output.clone()),
        keep_runs: sweep.is_some_and(|s| s.keep_runs) || file.keep_runs.unwrap_or(false),
        llm,
    })
}
