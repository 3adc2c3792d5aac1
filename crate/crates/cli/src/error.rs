use thiserror::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config, input data or output path. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// The computation itself failed, e.g. no oscillation to time. Exit code 3.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<noon_coherence::Error> for CliError {
    fn from(e: noon_coherence::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
