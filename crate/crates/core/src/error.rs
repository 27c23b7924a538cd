use thiserror::Error;

/// Errors raised by graph construction, factorization and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SddError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid edge ({u}, {v}): {reason}")]
    InvalidEdge { u: usize, v: usize, reason: String },

    #[error("classification: matrix is {found}, expected {expected}")]
    Classification { expected: &'static str, found: String },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("matrix is reducible")]
    Reducible,

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("breakdown in {method}: {detail}")]
    Breakdown { method: &'static str, detail: String },

    #[error("oracle cap exceeded: n = {n} > {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error("nullspace mismatch between operands")]
    NullspaceMismatch,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for SddError {
    fn from(e: std::io::Error) -> Self {
        SddError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SddError>;
