//! Spectral gap verdicts for groups of affine transformations of tori,
//! with exact witnesses, and ergodicity/mixing analysis on the dual
//! lattice.

pub mod affine;
pub mod core;
pub mod ergodic;
pub mod va;
pub mod verdict;

pub use affine::{dualize, AffineGroupSpec, AffineMap};
pub use core::{amenable_core, AmenabilityCertificate};
pub use ergodic::{ergodicity_check, mixing_evidence, ErgodicityReport, MixingReport};
pub use va::{virtually_abelian, VaAnswer, VaCertificate};
pub use verdict::{spectral_gap_verdict, Budgets, Verdict, VerdictKind, Witness};
