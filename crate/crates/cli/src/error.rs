use thiserror::Error;

/// Failure of a CLI command, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// A `validate` run found violations.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The analytic solution does not exist or does not oscillate.
    #[error("degenerate analytic regime: {0}")]
    Degenerate(String),

    #[error("computation failed: {0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation(_) => 1,
            Self::Config(_) => 2,
            Self::Degenerate(_) => 3,
            Self::Failure(_) => 4,
        }
    }
}

impl From<dicke_dyn::Error> for CliError {
    fn from(e: dicke_dyn::Error) -> Self {
        use dicke_dyn::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidConfig(_) | E::OffShell { .. } => Self::Config(e.to_string()),
            E::NoBoundRegime | E::Degenerate(_) | E::InfinitePeriod => Self::Degenerate(e.to_string()),
            _ => Self::Failure(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
