//! Zero/pole location, matching, logarithmic derivatives and exponential
//! factor fitting for meromorphic functions given as closures.
//!
//! Two functions with the same zeros and poles (with multiplicity) whose
//! logarithms grow slowly enough differ by `exp(polynomial)`. The pieces
//! here check each step of that argument numerically: [`locate_zeros_poles`]
//! and [`match_records`] compare the divisors, [`log_derivative`] compares
//! `dⁿ ln f`, [`fit_log_polynomial`] recovers the polynomial and
//! [`contour_decay_probe`] looks at the contour integrals that must vanish.

mod derivative;
mod fit;
mod handle;
mod locate;
mod matching;
mod probe;
mod quadrature;

pub use derivative::log_derivative;
pub use fit::{fit_log_polynomial, LogPolyFit};
pub use handle::{ComplexFn, FunctionHandle};
pub use locate::{locate_zeros_poles, winding_number, Region, ZeroPoleRecord};
pub use matching::{match_records, MatchReport};
pub use probe::contour_decay_probe;

pub(crate) use handle::richardson_diff;
