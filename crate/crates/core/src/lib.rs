//! Collaborative-document aggregation: event logs of proposals and votes,
//! consensus-conditioned inclusion rules, welfare and stability metrics,
//! synthetic agent populations and a discrete-event simulation driver.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below pin the usual
//! choices (`f64` for simulation, [`Exact`] for tie-sensitive checks).

pub mod fixtures;
pub mod model;
pub mod populations;
pub mod rules;
pub mod scalar;
pub mod scheduler;
pub mod verify;
pub mod welfare;

pub use scalar::Scalar;

/// Exact rational scalar for tie-sensitive computations.
pub type Exact = num_rational::Rational64;

pub type Tally = model::Tally<f64>;
pub type ExactTally = model::Tally<Exact>;
pub type ParagraphTally = model::ParagraphTally<f64>;
pub type SatisfactionReport = welfare::SatisfactionReport<f64>;
