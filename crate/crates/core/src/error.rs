use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight parameters p={p}, mu={mu}: need 1 < p < inf and 1/p < mu <= 1")]
    InvalidWeight { p: f64, mu: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at node {index} (t={t})")]
    NonFiniteSample { index: usize, t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("function is outside the vanishing-trace space: |u^({order})(0)| ~ {value:.3e} exceeds {tolerance:.3e}")]
    NonVanishingTrace { order: usize, value: f64, tolerance: f64 },

    /// Orders of the form s = k + 1 - mu + 1/p are excluded from the theory.
    #[error("limit exponent s={s} = k + 1 - mu + 1/p with k={k} is excluded")]
    LimitExponent { s: f64, k: usize },

    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    #[error("non-integrable parameter combination: {0}")]
    NonIntegrable(String),

    #[error("optimizer did not certify: residual {residual:.3e} above {tolerance:.3e}")]
    NotCertified { residual: f64, tolerance: f64 },

    #[error("data format error: {0}")]
    DataFormat(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
