//! The simulation loop: pick an agent, show it the current state, apply
//! what it does, and keep the rule's trajectory and metrics current.

mod artifacts;
mod policy;
mod run;
mod sweep;

use thiserror::Error;

use crate::model::ModelError;
use crate::populations::PopulationError;

pub use self::artifacts::{read_metrics, write_metrics, write_run_artifacts, write_series};
pub use self::policy::{AgentPolicy, Decision, EuclideanPolicy, UnstructuredPolicy};
pub use self::run::{replay, run_simulation, PrefixMetrics, RunResult, Selection, SimConfig, SkipRecord};
pub use self::sweep::{derive_seed, sweep, PolicyFactory, RunFailure, SweepConfig, SweepResult};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation configuration: {0}")]
    Config(String),
    /// An agent policy failed; `iteration` is the 1-based scheduler turn.
    #[error("iteration {iteration}: {source}")]
    Policy {
        iteration: usize,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("iteration {iteration}: agent action rejected by the log: {source}")]
    Action {
        iteration: usize,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Population(#[from] PopulationError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
