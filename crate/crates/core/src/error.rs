use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("elliptic parameter m = {m} outside [0, 1]; evaluate m > 1 through the reciprocal-parameter transform")]
    ParameterDomain { m: f64 },

    #[error("reciprocal-parameter transform needs m > 1, got {m}")]
    ReciprocalDomain { m: f64 },

    #[error("complete elliptic integral K(m) diverges at m = 1")]
    Divergent,

    #[error("no bound-luminosity regime for epsilon = 0 (the flow is pure precession)")]
    NoBoundRegime,

    #[error("degenerate bound-luminosity state: {0}")]
    Degenerate(String),

    #[error("separatrix orbit (k = 1) has infinite period")]
    InfinitePeriod,

    #[error("spin state is off shell at this energy (discriminant {discriminant})")]
    OffShell { discriminant: f64 },

    #[error("energy shell too small: {accepted} of {attempts} draws accepted (rate {rate})")]
    ShellTooSmall { accepted: usize, attempts: usize, rate: f64 },

    #[error("integration step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("empty trajectory")]
    EmptyTrajectory,
}
