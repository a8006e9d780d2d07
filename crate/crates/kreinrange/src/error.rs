//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KreinError {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("Gram matrix is numerically singular: smallest eigenvalue magnitude {smallest:e} below tolerance {tolerance:e}")]
    Singular { smallest: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis is rank deficient (rank {rank} of {count} vectors)")]
    RankDeficientBasis { rank: usize, count: usize },

    #[error("operator is not selfadjoint: G*A asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotSelfadjoint { asymmetry: f64, tolerance: f64 },

    #[error("operator is not non-negative: G*A has eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotNonNegative { eigenvalue: f64, tolerance: f64 },

    #[error("congruence matrix is ill conditioned: condition number {cond:e} exceeds {cap:e}")]
    IllConditioned { cond: f64, cap: f64 },

    #[error("requested class combination is unachievable: {0}")]
    Unachievable(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("an eigenvalue sits on the boundary of the requested interval (eigenvalue {eigenvalue}, boundary {boundary})")]
    BoundaryEigenvalue { eigenvalue: f64, boundary: f64 },

    #[error("{0} is not an eigenvalue")]
    NotAnEigenvalue(f64),

    #[error("vector is neutral; the numerical-range quotient is undefined")]
    NeutralVector,

    #[error("vector is in the kernel; the co-numerical-range quotient is undefined")]
    KernelVector,

    #[error("operator is zero")]
    ZeroOperator,

    #[error("inner product is definite; outside the indefinite hypotheses in strict mode")]
    DefiniteSpace,

    #[error("requested endpoint piece is empty")]
    EmptyPiece,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, KreinError>;
