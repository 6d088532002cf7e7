use thiserror::Error;

/// Errors raised by covariance-matrix algebra and the protocol evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter lies outside its admissible range.
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// The matrix violates the uncertainty principle.
    #[error("unphysical covariance matrix (minimum symplectic eigenvalue {min_nu:.3e})")]
    Unphysical { min_nu: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix must be square with even dimension, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("invalid mode selection: {0}")]
    InvalidModes(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("singular block encountered: {0}")]
    Singular(String),

    /// Bisection bracket without a sign change.
    #[error("no sign change in bracket: key rate is {0}")]
    NoSignChange(Security),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Security verdict when a rate keeps one sign over the whole search bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Security {
    AlwaysSecure,
    NeverSecure,
}

impl std::fmt::Display for Security {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Security::AlwaysSecure => f.write_str("always secure"),
            Security::NeverSecure => f.write_str("never secure"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
