use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid n = {n} for {kind}: {reason}")]
    InvalidN {
        kind: &'static str,
        n: usize,
        reason: &'static str,
    },
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("symbol is not finite at theta = {theta}")]
    NonFiniteSymbol { theta: f64 },
    #[error("coefficient table truncated at K = {have}, need K >= {need}")]
    InsufficientTruncation { have: usize, need: usize },
    #[error("{what} did not converge (last two values {previous} and {last})")]
    NonConvergence {
        what: &'static str,
        previous: f64,
        last: f64,
    },
    #[error("Fredholm determinant not converged at block size {size} (last two values {previous} and {last})")]
    FredholmNonConvergence {
        size: usize,
        previous: num_complex::Complex64,
        last: num_complex::Complex64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigenvalue bookkeeping failed: {0}")]
    Eigen(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
