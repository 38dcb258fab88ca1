use std::path::PathBuf;

use gzgw_core::Error as CoreError;
use thiserror::Error;

/// Process exit code for a failed verification run.
pub const EXIT_FAILED: i32 = 1;
/// Process exit code for unreadable, malformed or invalid input.
pub const EXIT_INPUT: i32 = 2;
/// Process exit code for input on the boundary stratum.
pub const EXIT_BOUNDARY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("verification failed: {count} check(s) out of tolerance, first: {first}")]
    VerifyFailed { count: usize, first: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Config(_) => EXIT_INPUT,
            CliError::Core(e) => match e {
                CoreError::BoundaryStratum { .. } => EXIT_BOUNDARY,
                CoreError::Parse(_)
                | CoreError::Dimension { .. }
                | CoreError::NotHermitian { .. }
                | CoreError::NonFinite { .. }
                | CoreError::Domain(_) => EXIT_INPUT,
                _ => EXIT_FAILED,
            },
            CliError::Write { .. } | CliError::VerifyFailed { .. } => EXIT_FAILED,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
