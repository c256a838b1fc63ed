//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("algebra descriptor mismatch between operands")]
    DescriptorMismatch,

    #[error("element is not invertible (determinant {determinant})")]
    NotInvertible { determinant: String },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("series diverges: imaginary part is not inside the positivity cone")]
    OutsideCone,

    #[error("point budget exhausted: achieved tail bound {achieved:e}, requested {requested:e}")]
    BudgetExceeded { achieved: f64, requested: f64 },

    #[error("unsupported dimension {got} for this operation (maximum {max})")]
    UnsupportedDimension { got: usize, max: usize },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("vector is not a lattice member")]
    NotLatticeMember,

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("rational parse error: {0}")]
    RationalParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
