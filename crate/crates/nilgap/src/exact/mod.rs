//! Exact linear algebra over Q and Z[√2].
//!
//! Everything in this module is arbitrary-precision and deterministic: the
//! decision procedures in [`crate::torus`] rely on these primitives never
//! rounding. Matrices are dense row-major; dimensions stay small (d ≤ 12)
//! so asymptotics are irrelevant next to correctness.

pub mod invariant;
pub mod lattice;
pub mod matrix;
pub mod modp;
pub mod poly;
pub mod rat;
pub mod subspace;

pub use invariant::{
    largest_invariant_inside, minimal_invariant_subspaces, spin, InvariantSearch, SearchCompleteness,
};
pub use lattice::{hermite_normal_form, integer_kernel, smith_normal_form};
pub use matrix::{all_eigenvalues_roots_of_unity, charpoly, root_of_unity_exponent, RatMatrix};
pub use poly::IntPolynomial;
pub use rat::{parse_rat, rat_to_string, QuadInt, Rat};
pub use subspace::Subspace;

use thiserror::Error;

/// Errors raised by exact-arithmetic operations.
#[derive(Debug, Error)]
pub enum ExactError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix has determinant {det}, expected ±1")]
    NotUnimodular { det: String },
    #[error("matrix entries are not integers")]
    NotIntegral,
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not invariant under the given matrix")]
    NotInvariant,
    #[error("search budget must be nonzero")]
    ZeroBudget,
    #[error("{0}")]
    Other(String),
}
