use std::path::PathBuf;

/// CLI-level failures, each mapped to a stable process exit code:
/// 1 validation, 2 numerical tolerance, 3 I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Tolerance(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<qwalk2_core::Error> for CliError {
    fn from(e: qwalk2_core::Error) -> Self {
        match e {
            // Failing to converge is a numerical breakdown, not bad input.
            qwalk2_core::Error::ConvergenceFailure => CliError::Tolerance(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub fn io_error(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.into(),
        source,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
