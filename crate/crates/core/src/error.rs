use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    InvalidVertex { vertex: usize, vertex_count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigendecomposition residual {residual:e} exceeds tolerance {tolerance:e}")]
    Numerical { residual: f64, tolerance: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("leakage {leakage:e} exceeds tolerance {tolerance:e}")]
    Leakage {
        leakage: f64,
        tolerance: f64,
        /// Per-phase off-column probability of the offending run.
        profile: Vec<f64>,
    },

    #[error("pipeline offset unavailable: {reason}; fall back to {fallback} phases")]
    PipelineOffset { reason: String, fallback: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
