//! The `ccr` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or schema error, 2 a property or replay
//! check failed, 3 runtime or gateway failure.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod population;

pub use error::CliError;
