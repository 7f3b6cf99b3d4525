use thiserror::Error;

/// Errors produced by cone construction, projection and estimation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input")]
    NonFinite,

    #[error("operation undefined for the trivial cone {{o}}")]
    TrivialCone,

    #[error("NNLS did not converge after {iterations} iterations")]
    NnlsNonConvergence { iterations: usize },

    #[error("unsupported cone variant for {op}: {reason}")]
    Unsupported { op: &'static str, reason: String },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("ill-conditioned coefficient system (condition number {cond:.3e}); choose a different lambda grid")]
    IllConditioned { cond: f64 },

    #[error("function evaluation failed: {0}")]
    BadFunction(String),

    #[error("biconic set cannot be evaluated at a pair containing the origin")]
    EtaAtOrigin,

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ConeError>;

impl From<std::io::Error> for ConeError {
    fn from(e: std::io::Error) -> Self {
        ConeError::Io(e.to_string())
    }
}
