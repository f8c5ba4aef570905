use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(&'static str),
    #[error("structure tensor has {got} entries, expected {expected}")]
    TensorSize { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator does not commute with multiplication by i (residual {residual:e})")]
    NotComplexLinear { residual: f64 },
    #[error("element is not a tripotent (residual {residual:e})")]
    NotATripotent { residual: f64 },
    #[error("tripotent is zero")]
    ZeroTripotent,
    #[error("element is zero")]
    ZeroElement,
    #[error("element norm {norm} differs from one")]
    NotNormOne { norm: f64 },
    #[error("singular values {first} and {second} are too close to separate")]
    ClusterAmbiguity { first: f64, second: f64 },
    #[error("random sample generation failed after {attempts} attempts")]
    DegenerateSample { attempts: usize },
    #[error("operation requires a matrix triple system")]
    UnsupportedSystem,
}
