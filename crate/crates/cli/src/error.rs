use thiserror::Error;

/// Failures of a subcommand, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing flags. Exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable, malformed or inconsistent input. Exit code 2.
    #[error(transparent)]
    Data(#[from] lupi_svm::Error),
    /// A solver stopped at its iteration cap. Exit code 3; outputs are
    /// still written.
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
