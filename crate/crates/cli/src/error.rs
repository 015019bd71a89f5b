use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input file.
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("{failed} verification check(s) failed")]
    VerificationFailed { failed: usize },
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::VerificationFailed { .. } => 1,
            CliError::Parse(_) | CliError::Output(_) => 2,
            CliError::Domain(_) => 3,
            CliError::NotConverged(_) => 4,
        })
    }

    /// Wraps a library error raised while handling `field`.
    pub fn domain(field: &str, err: qframe::Error) -> Self {
        CliError::Domain(format!("{field}: {err}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
