use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or option values.
    #[error("usage: {0}")]
    Usage(String),
    /// A config or input file that does not match its schema.
    #[error("schema: {0}")]
    Schema(String),
    /// A property check or replay comparison failed.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Simulation, I/O or gateway failure.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Schema(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<ccr_core::scheduler::SimError> for CliError {
    fn from(e: ccr_core::scheduler::SimError) -> Self {
        CliError::Runtime(e.to_string())
    }
}
