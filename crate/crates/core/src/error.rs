use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate edge ({u}, {v}) at line {line}")]
    DuplicateEdge { u: usize, v: usize, line: usize },

    #[error("self-loop on node {node} at line {line}")]
    SelfLoop { node: usize, line: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("unsupported normalization kind {0}")]
    UnsupportedKind(String),

    #[error("kind mismatch: operator uses {spec}, basis decomposes {basis}")]
    KindMismatch { spec: String, basis: String },

    #[error("resource limit: n={n} exceeds dense cap {cap}")]
    ResourceLimit { n: usize, cap: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular operator: {0}")]
    SingularOperator(String),

    #[error("solver failed after {iterations} iterations (residual {residual:.3e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("ill-posed fit: {0}")]
    IllPosed(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(expected: impl Into<String>, found: impl Into<String>) -> Error {
    Error::DimensionMismatch {
        expected: expected.into(),
        found: found.into(),
    }
}
