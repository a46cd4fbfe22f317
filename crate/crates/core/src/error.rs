use thiserror::Error;

use crate::homdesc::Violation;

/// Errors raised by the constructors and numeric procedures of this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid complex dimension n = {n}: complex hyperbolic space needs n >= 2")]
    InvalidDimension { n: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not skew-hermitian (residual {residual:.3e})")]
    NotSkewHermitian { residual: f64 },

    #[error("metric scale must be positive, got {mu}")]
    InvalidScale { mu: f64 },

    #[error("holonomy specification rejected: {0}")]
    Spec(Violation),

    #[error("invalid shift H_r: {0}")]
    InvalidShift(String),

    #[error("invalid special family: {0}")]
    InvalidSpecial(String),

    #[error("ansatz Gram matrix is ill-conditioned (condition number {condition:.3e})")]
    NumericalDegeneracy { condition: f64 },

    #[error("ambiguous classification: {0}")]
    Ambiguous(String),

    #[error("sweep refused: n = {n} exceeds the configured cap {cap}")]
    SweepCap { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
