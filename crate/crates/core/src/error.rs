use thiserror::Error;

/// Errors raised by the numerical core and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("Cholesky factorization failed at pivot {pivot} (value {value:e})")]
    Cholesky { pivot: usize, value: f64 },

    #[error("posterior variance {0:e} is below the roundoff tolerance")]
    NegativeVariance(f64),

    #[error("confidence level {0} is outside (0, 1)")]
    InvalidDelta(f64),

    #[error("candidate set is empty")]
    EmptyGrid,

    #[error("index {index} out of range for {len} candidates")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{algorithm} trial {trial} step {step}: {source}")]
    Trajectory {
        algorithm: String,
        trial: usize,
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that originate in the numerical core rather than in
    /// user-provided configuration.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Cholesky { .. } | Error::NegativeVariance(_) | Error::NonFinite { .. } => true,
            Error::Trajectory { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
