use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid label sets: {0}")]
    LabelSets(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("quadrature did not reach relative error {target:e} (estimate {estimate:e} after {intervals} subintervals)")]
    Quadrature {
        target: f64,
        estimate: f64,
        intervals: usize,
    },

    #[error("truncated environment keeps trace {captured:.6}, below {threshold}")]
    Truncation { captured: f64, threshold: f64 },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
