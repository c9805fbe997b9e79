//! Γ, ψ and ψ′ on the complex plane.
//!
//! Arguments are pushed to the right with `Γ(1+z) = zΓ(z)` (and the
//! matching recurrences for ψ, ψ′) until `Re w ≥ shift_threshold`, where the
//! Stirling series with 10 Bernoulli terms is accurate to a few ulps.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::C64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B₂, B₄, …, B₂₂
const BERNOULLI: [f64; 11] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
];

const STIRLING_TERMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEvalConfig {
    pub shift_threshold: f64,
    pub series_terms: u32,
}

impl GammaEvalConfig {
    pub fn new(shift_threshold: f64, series_terms: u32) -> Result<Self> {
        if !(shift_threshold >= 8.0) {
            return Err(Error::InvalidParameter(format!(
                "shift_threshold must be >= 8, got {shift_threshold}"
            )));
        }
        if series_terms < 50 {
            return Err(Error::InvalidParameter(format!(
                "series_terms must be >= 50, got {series_terms}"
            )));
        }
        Ok(Self {
            shift_threshold,
            series_terms,
        })
    }
}

impl Default for GammaEvalConfig {
    fn default() -> Self {
        Self {
            shift_threshold: 15.0,
            series_terms: 50,
        }
    }
}

fn check_pole(z: C64, what: &str) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("{what}: non-finite argument {z}")));
    }
    if z.re <= 0.5 {
        let k = z.re.round();
        if k <= 0.0 && (z - C64::new(k, 0.0)).norm() < 1e-12 {
            return Err(Error::Pole {
                at: z,
                what: what.to_string(),
            });
        }
    }
    Ok(())
}

fn shift_count(z: C64, threshold: f64) -> u32 {
    if z.re >= threshold {
        0
    } else {
        (threshold - z.re).ceil() as u32
    }
}

fn ln_gamma_stirling(w: C64) -> C64 {
    let mut acc = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut p = inv;
    for (k, b) in BERNOULLI.iter().take(STIRLING_TERMS).enumerate() {
        let n = 2.0 * (k + 1) as f64;
        acc += *b / (n * (n - 1.0)) * p;
        p *= inv2;
    }
    acc
}

/// `Γ(z)`.
pub fn gamma_fn(z: C64, cfg: &GammaEvalConfig) -> Result<C64> {
    check_pole(z, "gamma")?;
    let n = shift_count(z, cfg.shift_threshold);
    let mut denom = C64::new(1.0, 0.0);
    for k in 0..n {
        denom *= z + k as f64;
    }
    Ok(ln_gamma_stirling(z + n as f64).exp() / denom)
}

/// `ψ(z) = Γ′(z)/Γ(z)`.
pub fn digamma(z: C64, cfg: &GammaEvalConfig) -> Result<C64> {
    check_pole(z, "digamma")?;
    let n = shift_count(z, cfg.shift_threshold).max(cfg.series_terms);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        acc -= 1.0 / (z + k as f64);
    }
    let w = z + n as f64;
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    acc += w.ln() - 0.5 * inv;
    let mut p = inv2;
    for (k, b) in BERNOULLI.iter().take(STIRLING_TERMS).enumerate() {
        acc -= *b / (2.0 * (k + 1) as f64) * p;
        p *= inv2;
    }
    Ok(acc)
}

/// `ψ′(z) = Σ_{k≥0} 1/(z+k)²`.
pub fn trigamma(z: C64, cfg: &GammaEvalConfig) -> Result<C64> {
    check_pole(z, "trigamma")?;
    let n = shift_count(z, cfg.shift_threshold).max(cfg.series_terms);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let t = 1.0 / (z + k as f64);
        acc += t * t;
    }
    let w = z + n as f64;
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    acc += inv + 0.5 * inv2;
    let mut p = inv2 * inv;
    for b in BERNOULLI.iter().take(STIRLING_TERMS) {
        acc += *b * p;
        p *= inv2;
    }
    Ok(acc)
}

/// `∏_{k=1}^{n−1} sin(kπ/n)`.
pub fn sine_product(n: u32) -> f64 {
    (1..n).map(|k| (k as f64 * PI / n as f64).sin()).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }
    fn cfg() -> GammaEvalConfig {
        GammaEvalConfig::default()
    }

    #[test]
    fn gamma_special_values() {
        let g = gamma_fn(c(0.5, 0.0), &cfg()).unwrap();
        assert!((g - c(PI.sqrt(), 0.0)).norm() < 1e-12 * PI.sqrt());
        let g = gamma_fn(c(5.0, 0.0), &cfg()).unwrap();
        assert!((g - c(24.0, 0.0)).norm() < 1e-12 * 24.0);
    }

    #[test]
    fn duplication_spot_value() {
        let z = c(0.3, 0.0);
        let lhs = gamma_fn(z, &cfg()).unwrap() * gamma_fn(c(0.8, 0.0), &cfg()).unwrap();
        let rhs = 2f64.powf(1.0 - 0.6) * PI.sqrt() * gamma_fn(c(0.6, 0.0), &cfg()).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * rhs.norm());
    }

    #[test]
    fn gamma_far_left_and_complex() {
        // Γ(−4.5) = 32√π/945
        let g = gamma_fn(c(-4.5, 0.0), &cfg()).unwrap();
        let expected = -32.0 * PI.sqrt() / 945.0;
        assert!((g.re - expected).abs() < 1e-12 * expected.abs(), "{g}");
        // |Γ(iy)|² = π/(y sinh πy)
        let y = 1.7;
        let g = gamma_fn(c(0.0, y), &cfg()).unwrap();
        let expected = PI / (y * (PI * y).sinh());
        assert!((g.norm_sqr() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn digamma_values() {
        let v = digamma(c(1.0, 0.0), &cfg()).unwrap();
        assert!((v + c(EULER_GAMMA, 0.0)).norm() < 1e-12);
        let z = c(0.37, 0.0);
        let d = digamma(z + 1.0, &cfg()).unwrap() - digamma(z, &cfg()).unwrap();
        assert!((d - 1.0 / z).norm() < 1e-12 * (1.0 / z).norm());
        let s: C64 = (1..=3)
            .map(|k| digamma(c(k as f64 / 3.0, 0.0), &cfg()).unwrap())
            .sum();
        let expected = -3.0 * (EULER_GAMMA + 3f64.ln());
        assert!((s.re - expected).abs() < 1e-11 * expected.abs());
    }

    #[test]
    fn trigamma_values() {
        let v = trigamma(c(1.0, 0.0), &cfg()).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-12);
        let lhs = trigamma(c(0.7, 0.0), &cfg()).unwrap() + trigamma(c(1.2, 0.0), &cfg()).unwrap();
        let rhs = 4.0 * trigamma(c(1.4, 0.0), &cfg()).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * rhs.norm());
        let z = c(0.3, 0.0);
        let lhs = trigamma(z, &cfg()).unwrap() + trigamma(1.0 - z, &cfg()).unwrap();
        let rhs = PI * PI / (PI * z).sin().powi(2);
        assert!((lhs - rhs).norm() < 1e-11 * rhs.norm());
    }

    #[test]
    fn poles_are_rejected() {
        for k in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma_fn(c(k, 0.0), &cfg()), Err(Error::Pole { .. })));
            assert!(matches!(digamma(c(k, 0.0), &cfg()), Err(Error::Pole { .. })));
            assert!(matches!(trigamma(c(k, 0.0), &cfg()), Err(Error::Pole { .. })));
        }
        assert!(gamma_fn(c(-1.0, 1e-6), &cfg()).is_ok());
    }

    #[test]
    fn config_invariants() {
        assert!(GammaEvalConfig::new(7.9, 50).is_err());
        assert!(GammaEvalConfig::new(8.0, 49).is_err());
        assert!(GammaEvalConfig::new(8.0, 50).is_ok());
    }

    #[test]
    fn euler_sine_product_n3() {
        assert!((sine_product(3) - 0.75).abs() < 1e-14);
    }
}
