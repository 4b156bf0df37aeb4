//! Computable asymptotic centers, Δ-/strong-Δ-/polar convergence detectors,
//! subsequence extraction, Staples-rotundity moduli, fixed-point diagnostics
//! for nonexpansive maps, and discrete Lᵖ duality-map checks.
//!
//! Every infinite quantifier ("for every y", "for n large") is replaced by an
//! explicit finite family: probe sets, tail windows, seeded subsequences.
//! Verdicts are therefore certificates relative to those families, and every
//! report names the family it used.

pub mod analysis;
pub mod asymptotic;
pub mod convergence;
mod error;
pub mod extraction;
pub mod fixedpoint;
pub mod numeric;
pub mod registry;
pub mod rotund;
pub mod spaces;

pub use error::{Error, Result};
