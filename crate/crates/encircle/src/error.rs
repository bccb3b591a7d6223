use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(encircle_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical aborts, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            _ => 1,
        }
    }
}

impl From<encircle_core::Error> for CliError {
    fn from(e: encircle_core::Error) -> Self {
        use encircle_core::Error as E;
        match e {
            E::Inadmissible
            | E::InvalidParameter { .. }
            | E::NonPositiveSpacing { .. }
            | E::RingTooSmall(_)
            | E::Dimension { .. }
            | E::Precondition(_)
            | E::AgentAtTarget(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
