use std::path::PathBuf;

use thiserror::Error;

/// Exit status for input or argument problems.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status when an estimator cannot be computed.
pub const EXIT_ESTIMATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Estimation(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io { .. } => EXIT_VALIDATION,
            CliError::Estimation(_) => EXIT_ESTIMATION,
        }
    }

    pub fn estimation(e: impl std::fmt::Display) -> Self {
        CliError::Estimation(e.to_string())
    }
}
