//! Welfare and stability measures, the exhaustive welfare oracle, and
//! Pareto-front extraction over (satisfaction, stability) points.

mod extension;
mod pareto;
mod satisfaction;

use thiserror::Error;

use crate::model::{ModelError, ParagraphId};
use crate::rules::Trajectory;

pub use self::extension::{destabilizing_extension, flip_extension, Direction, Extension};
pub use self::pareto::{dominates, mean_by_rule, pareto_front, MetricPoint};
pub use self::satisfaction::{
    community_by_paragraph, normalized_satisfaction_live, satisfaction, swm_oracle, SatisfactionReport,
    ORACLE_MAX_PARAGRAPHS,
};

#[derive(Debug, Error)]
pub enum WelfareError {
    #[error("exhaustive search over {found} paragraphs exceeds the cap of {cap}")]
    TooManyParagraphs { found: usize, cap: usize },
    #[error("stability is undefined on an empty log")]
    EmptyLog,
    #[error("paragraph {0} does not appear in the log")]
    UnknownParagraph(ParagraphId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `U(R, E)`.
pub fn count_updates(trajectory: &Trajectory) -> usize {
    trajectory.updates()
}

/// `(|E| − U) / |E|`: the share of events after which the document stayed
/// the same.
pub fn stability_metric(trajectory: &Trajectory) -> Result<f64, WelfareError> {
    if trajectory.is_empty() {
        return Err(WelfareError::EmptyLog);
    }
    let e = trajectory.len() as f64;
    Ok((e - trajectory.updates() as f64) / e)
}
