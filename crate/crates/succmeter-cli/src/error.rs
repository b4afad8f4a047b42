use thiserror::Error;

/// CLI failure with a machine-readable category and a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or syntactically invalid configuration.
    #[error("{0}")]
    Parse(String),
    /// Configuration that parses but violates a model invariant.
    #[error("{0}")]
    Validation(String),
    /// Failure raised during computation on validated inputs.
    #[error("{0}")]
    Numerical(String),
    /// Output files could not be written.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Tag a core error raised while resolving the configuration.
pub fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

/// Tag a core error raised during computation.
pub fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}
