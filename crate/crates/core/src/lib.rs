//! Numerical special functions (Jacobi theta, Weierstrass σ/ζ/℘, Γ/ψ/ψ′)
//! together with an engine that locates and matches zeros and poles,
//! compares logarithmic derivatives and fits residual exponential factors,
//! and an executable catalog of identities between these functions.
//!
//! All public evaluators take the modular parameter `τ` (with `Im τ > 0`)
//! rather than a nome; each function applies its own nome convention
//! internally and documents it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eisenstein;
pub mod error;
pub mod gammatrig;
pub mod identity_suite;
pub mod lemma_engine;
pub mod theta;
pub mod weierstrass;

pub use eisenstein::{LatticeParams, TruncationPolicy};
pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Relative difference `|a−b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: C64, b: C64) -> f64 {
    rel_err_floor(a, b, 1e-300)
}

/// `|a−b| / max(|a|, |b|, floor)`.
pub fn rel_err_floor(a: C64, b: C64, floor: f64) -> f64 {
    let scale = a.norm().max(b.norm()).max(floor);
    (a - b).norm() / scale
}
