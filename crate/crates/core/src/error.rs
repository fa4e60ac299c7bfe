use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Geometry that collapses (parallel rays, zero-area faces, ...).
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    /// A least-squares or nullspace problem is too ill-conditioned to trust.
    #[error("ill-conditioned system (condition number {condition:.3e}): {context}")]
    Conditioning { condition: f64, context: String },

    /// An iterative or discretised solve did not meet its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
