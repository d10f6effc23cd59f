use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tensor not symmetric positive definite at node {node} (coordinates {coords:?}): smallest eigenvalue {min_eigenvalue}")]
    NotSpd {
        node: usize,
        coords: Vec<f64>,
        min_eigenvalue: f64,
    },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("unsupported problem: {0}")]
    Unsupported(String),

    #[error("symmetrization defect {defect:e} exceeds limit {limit:e}")]
    SymmetryDefect { defect: f64, limit: f64 },

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("invalid solver request: {0}")]
    InvalidRequest(String),

    #[error("eigensolver did not converge after {iterations} iterations; best residuals {best_residuals:?}")]
    NotConverged {
        iterations: usize,
        best_residuals: Vec<f64>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {inner}")]
    Context { context: String, inner: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            inner: Box::new(self),
        }
    }
}
