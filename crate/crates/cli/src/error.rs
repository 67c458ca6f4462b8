use std::process::ExitCode;

use thiserror::Error;
use toeplitz_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("{0}")]
    Failure(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(e: CoreError) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Failure(_) => ExitCode::from(1),
            CliError::Config(_) | CliError::Io(_) => ExitCode::from(2),
            CliError::Budget(_) => ExitCode::from(3),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            e if e.is_budget() => CliError::Budget(e.to_string()),
            CoreError::InvalidProfile(_)
            | CoreError::InvalidArgument(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::OutsideDomain(_)
            | CoreError::NotOnBoundary { .. }
            | CoreError::DepthTooLarge { .. }
            | CoreError::MalformedTable(_) => CliError::Config(e.to_string()),
            CoreError::Io(m) => CliError::Io(m),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
