use std::io;

use ramify_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitCode {
    Ok = 0,
    Io = 1,
    Schema = 2,
    OracleRange = 3,
    Precondition = 4,
    Numeric = 5,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    /// Malformed input; the message starts with the offending field.
    #[error("schema: {0}")]
    Schema(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io { .. } => ExitCode::Io,
            CliError::Schema(_) => ExitCode::Schema,
            CliError::Numeric(_) => ExitCode::Numeric,
            CliError::Core(e) => match e {
                CoreError::OracleRange | CoreError::TrialOracleRange { .. } => ExitCode::OracleRange,
                CoreError::NoConvergence { .. } => ExitCode::Numeric,
                CoreError::Invalid(_) => ExitCode::Schema,
                _ => ExitCode::Precondition,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
