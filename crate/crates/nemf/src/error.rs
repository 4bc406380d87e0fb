use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A field coefficient became NaN/Inf during time stepping. Usually
    /// means dt is too large for the chosen penalty width / resolution.
    #[error("non-finite field at t = {t} (step {step}); dt too large for eta/resolution?")]
    NonFinite { t: f64, step: u64 },

    #[error("degenerate grid: resolution {0} below the minimum of 8")]
    Degenerate(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("mismatched trajectories: {0}")]
    MismatchedTrajectories(String),

    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid value for {key}: {msg}")]
    Validation { key: String, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
