//! Consensus-conditioned rules (CCRs) and their relatives.
//!
//! A CCR scores every proposed paragraph with a consensus scoring function
//! and includes those scoring at least the threshold. Scores come from a
//! static kernel (a function of the stance matrix), optionally passed
//! through a dynamizer that makes the rule depend on how far the process
//! has progressed: a *harsh* dynamizer freezes the kernel at the prefix
//! where a progress parameter reaches a cutoff, a *smooth* one attenuates
//! it with exponential decay in that parameter.

mod ccr;
mod dynamics;
mod grid;
mod kernel;
mod rm;
mod sentinel;
mod solution;
mod spec;

use thiserror::Error;

use crate::model::{ModelError, ParagraphId};

pub use self::ccr::{ccr_solution, ccr_trajectory, dynamic_score, RuleEvaluator};
pub use self::dynamics::{f_exp, harsh_prefix, param_value, DynamicParam, Dynamizer};
pub use self::grid::{build_rule_grid, GridSpec};
pub use self::kernel::{static_score, static_scores, RamsBase, StaticKernel};
pub use self::rm::{rm_solution, TieBreak};
pub use self::sentinel::sentinel_rule;
pub use self::solution::{Solution, Trajectory};
pub use self::spec::RuleSpec;

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("paragraph {0} does not appear in the log")]
    UnknownParagraph(ParagraphId),
    #[error("{what} = {value} is outside [0, 1]")]
    Domain { what: &'static str, value: f64 },
    #[error("parameter {0} is rule-relative and needs a rule to evaluate")]
    MissingRule(DynamicParam),
    #[error("invalid rule configuration: {0}")]
    Config(String),
    #[error("cannot parse rule {input:?}: bad token {token:?} ({reason})")]
    Parse {
        input: String,
        token: String,
        reason: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}
