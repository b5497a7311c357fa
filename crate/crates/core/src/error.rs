use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("expected a {expected} isometry, found {found}")]
    ClassMismatch { expected: &'static str, found: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no block with these parameters: {0}")]
    Existence(String),

    #[error("assembly failed: relator residual {residual:.3e} exceeds {tol:.1e}")]
    Assembly { residual: f64, tol: f64 },

    #[error("surfaces are not comparable: {0}")]
    Incomparable(String),

    #[error("no hyperbolic structure: {0}")]
    NoHyperbolicStructure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Fenchel-Nielsen recovery failed: {0}")]
    Recovery(String),

    #[error("cocycle evaluation failed: {0}")]
    Cocycle(String),

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize, weights: Vec<f64> },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("not a rotation pair: {0}")]
    NotARotation(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
