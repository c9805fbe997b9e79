//! Deterministic z-sampling: a Halton sequence over a box or a lattice cell,
//! filtered by a per-case exclusion predicate.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::Binding;
use crate::error::{Error, Result};
use crate::C64;

/// Keep-predicate `(binding, z, exclusion) -> bool`.
pub type KeepFn = Arc<dyn Fn(&Binding, C64, f64) -> bool + Send + Sync>;

/// How the lattice-cell coordinates `s + tτ` are scaled into `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellScale {
    /// `z = s + tτ`
    Unit,
    /// `z = π(s + tτ)`, the theta-function variable
    Pi,
    /// `z = 2ω₁(s + tτ)`, the Weierstrass variable
    TwoOmega1,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleDomain {
    /// A single dummy point `z = 0` for identities between constants.
    Scalar,
    /// Fixed points.
    Points(Vec<C64>),
    /// Axis-aligned box in the z-plane.
    Box { lower_left: C64, upper_right: C64 },
    /// `z = scale·(s + tτ)` with `s, t ∈ [lo, hi]`.
    Cell { lo: f64, hi: f64, scale: CellScale },
}

#[derive(Clone)]
pub struct SampleSpec {
    pub count: usize,
    pub domain: SampleDomain,
    pub exclusion: f64,
    pub keep: Option<KeepFn>,
}

impl fmt::Debug for SampleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampleSpec")
            .field("count", &self.count)
            .field("domain", &self.domain)
            .field("exclusion", &self.exclusion)
            .field("keep", &self.keep.is_some())
            .finish()
    }
}

impl SampleSpec {
    pub fn scalar() -> Self {
        Self { count: 1, domain: SampleDomain::Scalar, exclusion: 0.0, keep: None }
    }

    pub fn points(points: Vec<C64>) -> Self {
        Self { count: points.len(), domain: SampleDomain::Points(points), exclusion: 0.0, keep: None }
    }

    pub fn boxed(lower_left: C64, upper_right: C64, count: usize) -> Self {
        Self { count, domain: SampleDomain::Box { lower_left, upper_right }, exclusion: 0.0, keep: None }
    }

    pub fn cell(scale: CellScale, lo: f64, hi: f64, count: usize) -> Self {
        Self { count, domain: SampleDomain::Cell { lo, hi, scale }, exclusion: 0.0, keep: None }
    }

    pub fn excluding<F>(mut self, exclusion: f64, keep: F) -> Self
    where
        F: Fn(&Binding, C64, f64) -> bool + Send + Sync + 'static,
    {
        self.exclusion = exclusion;
        self.keep = Some(Arc::new(keep));
        self
    }

    /// The sample points for one binding; identical on every call.
    pub fn points_for(&self, b: &Binding) -> Result<Vec<C64>> {
        let raw = |i: usize| -> Option<C64> {
            let (u, v) = (halton(i, 2), halton(i, 3));
            match &self.domain {
                SampleDomain::Scalar | SampleDomain::Points(_) => None,
                SampleDomain::Box { lower_left, upper_right } => Some(C64::new(
                    lower_left.re + u * (upper_right.re - lower_left.re),
                    lower_left.im + v * (upper_right.im - lower_left.im),
                )),
                SampleDomain::Cell { lo, hi, scale } => {
                    let w = C64::new(lo + u * (hi - lo), 0.0) + b.tau * (lo + v * (hi - lo));
                    Some(match scale {
                        CellScale::Unit => w,
                        CellScale::Pi => w * PI,
                        CellScale::TwoOmega1 => w * 2.0 * b.omega1,
                    })
                }
            }
        };
        let accept = |z: C64| self.keep.as_ref().is_none_or(|k| k(b, z, self.exclusion));
        match &self.domain {
            SampleDomain::Scalar => return Ok(vec![C64::new(0.0, 0.0)]),
            SampleDomain::Points(p) => return Ok(p.iter().copied().filter(|&z| accept(z)).collect()),
            _ => {}
        }
        let mut out = Vec::with_capacity(self.count);
        for i in 1..=64 * self.count.max(1) {
            let z = raw(i).expect("box or cell domain");
            if accept(z) {
                out.push(z);
                if out.len() == self.count {
                    return Ok(out);
                }
            }
        }
        Err(Error::InvalidParameter(format!(
            "only {} of {} sample points survive the exclusion filter",
            out.len(),
            self.count
        )))
    }
}

/// Radical inverse of `i` in `base`.
fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Distance from `u` to the grid `{a/p + bτ/r : a, b ∈ ℤ}`.
pub fn grid_distance(u: C64, tau: C64, p: u32, r: u32) -> f64 {
    let (p, r) = (p as f64, r as f64);
    let y = u.im / tau.im;
    let b0 = (y * r).round() as i64;
    let mut best = f64::INFINITY;
    for b in b0 - 2..=b0 + 2 {
        let w = u - tau * (b as f64 / r);
        let a0 = (w.re * p).round() as i64;
        for a in a0 - 1..=a0 + 1 {
            best = best.min((w - a as f64 / p).norm());
        }
    }
    best
}

/// Distance from `z` to the real grid `step·ℤ`.
pub fn real_grid_distance(z: C64, step: f64) -> f64 {
    (z - (z.re / step).round() * step).norm()
}
