//! Spectral gap decisions for groups of affine transformations of tori,
//! with numerical corroboration on the dual lattice and on nilmanifold
//! building blocks.
//!
//! The library answers, with exact certificates, whether the action of a
//! finitely generated group of affine torus maps has a spectral gap, and
//! backs the verdicts with Koopman-operator numerics on the dual lattice,
//! metaplectic estimates for Heisenberg components, and exact coadjoint
//! orbit computations for the free 2-step nilpotent group on three
//! generators.
//!
//! See the `book/` guide for a narrative walkthrough; its code snippets
//! compile as doctests of this crate.

pub mod exact;
pub mod torus;
pub mod walk;

pub use exact::{RatMatrix, Subspace};
pub use torus::{AffineGroupSpec, AffineMap, Verdict, VerdictKind};
