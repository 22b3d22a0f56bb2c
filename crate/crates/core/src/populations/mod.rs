//! Synthetic agent behaviour: the unstructured random agent and the
//! Euclidean interval agent, plus population sampling for the latter.

mod euclidean;
mod unstructured;
mod view;

use thiserror::Error;

pub use self::euclidean::{
    euclidean_step, read_population, sample_population, write_population, EuclideanAgent, IdealPointDistribution,
    PopulationSpec, DEFAULT_WIDTH, R_MIN,
};
pub use self::unstructured::{unstructured_step, UnstructuredDraw};
pub use self::view::{AgentAction, AgentView, ParagraphState, Payload};

/// Seeded generator used throughout simulations.
pub type SimRng = rand_chacha::ChaCha8Rng;

#[derive(Debug, Error)]
pub enum PopulationError {
    #[error("invalid population configuration: {0}")]
    Config(String),
    #[error("population file line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
