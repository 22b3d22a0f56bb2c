//! Demographic tables and the sentiment-bucketed proposal corpus.
//!
//! Sample files with the expected schemas ship in the crate's `data/`
//! directory and are embedded at build time.

mod corpus;
mod demographics;
mod profiles;

use thiserror::Error;

pub use self::corpus::{bundled_corpus, load_corpus, parse_corpus, CorpusFile, Domain, ProposalExample};
pub use self::demographics::{bundled_demographics, load_demographics, parse_demographics, DemographicCell};
pub use self::profiles::{sample_profiles, AgentProfile, SentimentDistribution};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("schema error{}: {reason}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Schema { line: Option<usize>, reason: String },
    #[error("line {line}: negative population count {count}")]
    NegativeCount { line: usize, count: f64 },
    #[error("sentiment score {score} of {text:?} is outside [0, 1]")]
    ScoreOutOfRange { text: String, score: f64 },
    #[error("duplicate proposal text {0:?}")]
    DuplicateText(String),
    #[error("invalid sampling configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DatasetError {
    fn schema(line: Option<usize>, reason: impl Into<String>) -> Self {
        DatasetError::Schema {
            line,
            reason: reason.into(),
        }
    }
}
