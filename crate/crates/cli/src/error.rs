//! Error classification driving the process exit code:
//! 1 config, 2 numerical, 3 I/O.

use openqs::dynamics::DynamicsError;
use openqs::models::ModelError;
use openqs::operators::OperatorError;
use openqs::sonify::SonifyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidGrid(_)
            | ModelError::InvalidParams(_)
            | ModelError::ModelTooLarge { .. }
            | ModelError::BadTruncationRank { .. } => CliError::Config(e.to_string()),
            ModelError::Operator(op) => op.into(),
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidTimeGrid(_) | DynamicsError::EmptyEnsemble => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<SonifyError> for CliError {
    fn from(e: SonifyError) -> Self {
        match e {
            SonifyError::InvalidParams(_)
            | SonifyError::RankTooSmall { .. }
            | SonifyError::AliasingGuard { .. }
            | SonifyError::WindowTooShort { .. }
            | SonifyError::WindowTooLong { .. } => CliError::Config(e.to_string()),
            SonifyError::Io(io) => CliError::Io(io.to_string()),
            SonifyError::PathExists(_) => CliError::Io(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
