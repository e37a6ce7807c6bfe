use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error(
        "quadrature budget exhausted: error estimate {err_estimate:.3e} above \
         tolerance {tol:.3e} after {nodes} nodes (best value {best:.6e})"
    )]
    QuadratureBudget {
        best: f64,
        err_estimate: f64,
        tol: f64,
        nodes: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("{0}")]
    Unsupported(String),
}
