//! Numerical and co-numerical ranges of non-negative operators on
//! finite-dimensional indefinite inner-product spaces.
//!
//! The crate predicts both ranges in closed form from the spectrum and its
//! sign structure, builds the induced quotient operator, verifies the
//! spectral-inclusion relations, and cross-checks every prediction against
//! sampling and optimization oracles that only evaluate the defining
//! quotients.

pub mod error;
pub mod linalg;
pub mod space;
pub mod tol;

pub mod operator;
pub mod realset;
pub mod spectral;
pub mod generate;
pub mod ranges;
pub mod quotient;
pub mod inclusion;
pub mod problem;
pub mod report;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{KreinError, Result};
pub use operator::{build_operator, krein_adjoint, KreinOperator};
pub use space::{build_space, GramSpace, SubspaceClass, VectorClass};
pub use tol::Tolerances;

/// Crate version reported by the CLI and embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
