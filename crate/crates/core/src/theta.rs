//! Jacobi theta functions `θ₁…θ₄(z|τ)` as nome series, their z-derivatives,
//! the product form of `θ₁′(0)`, and triple-product evaluators.
//!
//! Series functions use the nome `q = e^{iπτ}`; the triple-product
//! evaluators use `q = e^{2πiτ}` and `x = e^{2πiz}`. Callers only ever pass
//! `τ`.

use std::f64::consts::PI;

use crate::eisenstein::TruncationPolicy;
use crate::error::{Error, Result};
use crate::{C64, I};

/// Smallest `Im τ` accepted by the series evaluators.
pub const MIN_IM_TAU: f64 = 0.05;

/// Highest z-derivative order supported by [`theta_z_derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    /// odd in z, zeros at `(m + nτ)π`
    T1,
    /// zeros at `(m + 1/2 + nτ)π`
    T2,
    /// zeros at `(m + 1/2 + (n + 1/2)τ)π`
    T3,
    /// zeros at `(m + (n + 1/2)τ)π`
    T4,
}

impl ThetaKind {
    pub const ALL: [ThetaKind; 4] = [ThetaKind::T1, ThetaKind::T2, ThetaKind::T3, ThetaKind::T4];

    /// Zero of the function in the cell, as `(a, b)` in `(a + bτ)π`.
    pub fn zero_offset(self) -> (f64, f64) {
        match self {
            ThetaKind::T1 => (0.0, 0.0),
            ThetaKind::T2 => (0.5, 0.0),
            ThetaKind::T3 => (0.5, 0.5),
            ThetaKind::T4 => (0.0, 0.5),
        }
    }

    /// Sign picked up under `z → z + mπ + nπτ`.
    fn shift_sign(self, m: i64, n: i64) -> f64 {
        let parity = match self {
            ThetaKind::T1 => m + n,
            ThetaKind::T2 => m,
            ThetaKind::T3 => 0,
            ThetaKind::T4 => n,
        };
        if parity.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn check_tau(tau: C64) -> Result<()> {
    if !tau.is_finite() || !(tau.im >= MIN_IM_TAU) {
        return Err(Error::Domain(format!(
            "theta series need Im τ >= {MIN_IM_TAU}, got τ = {tau}"
        )));
    }
    Ok(())
}

/// `θ_k(z|τ)`.
pub fn theta(kind: ThetaKind, z: C64, tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    theta_z_derivative(kind, 0, z, tau, policy)
}

/// `d^order/dz^order θ_k(z|τ)`, `order ≤ 8`.
///
/// Arguments with `|Im z| > π Im τ / 2` are first moved into the strip
/// around the real axis with the quasi-periodicity
/// `θ(z + mπ + nπτ) = ± q^{−n²} e^{−2inz} θ(z)`; derivatives of the
/// multiplier are folded back in with the Leibniz rule.
pub fn theta_z_derivative(
    kind: ThetaKind,
    order: u32,
    z: C64,
    tau: C64,
    policy: &TruncationPolicy,
) -> Result<C64> {
    check_tau(tau)?;
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!(
            "derivative order {order} exceeds {MAX_DERIVATIVE_ORDER}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    let strip = PI * tau.im;
    let n = if z.im.abs() > 0.5 * strip {
        (z.im / strip).round() as i64
    } else {
        0
    };
    let shifted = z - PI * tau * n as f64;
    let m = (shifted.re / PI).round() as i64;
    let z0 = shifted - PI * m as f64;

    let series = series_derivatives(kind, order, z0, tau, policy)?;
    if n == 0 && m == 0 {
        return Ok(series[order as usize]);
    }
    let nf = n as f64;
    let mult = kind.shift_sign(m, n) * (-I * PI * tau * nf * nf - 2.0 * I * nf * z0).exp();
    let rate = -2.0 * I * nf;
    // Leibniz: Σ_k C(order,k) rate^k θ^{(order−k)}(z0)
    let mut acc = C64::new(0.0, 0.0);
    let mut binom = 1.0;
    let mut rate_pow = C64::new(1.0, 0.0);
    for k in 0..=order {
        acc += binom * rate_pow * series[(order - k) as usize];
        binom = binom * (order - k) as f64 / (k + 1) as f64;
        rate_pow *= rate;
    }
    Ok(mult * acc)
}

/// `θ_k(z|τ)` summed directly from the nome series, without moving `z`
/// into the fundamental strip first. Slower for large `|Im z|` but
/// independent of the quasi-periodicity used by [`theta`].
pub fn theta_series(kind: ThetaKind, z: C64, tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_tau(tau)?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    Ok(series_derivatives(kind, 0, z, tau, policy)?[0])
}

/// Term-wise derivatives of orders `0..=order` of the raw nome series.
fn series_derivatives(
    kind: ThetaKind,
    order: u32,
    z: C64,
    tau: C64,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    let mut out = vec![C64::new(0.0, 0.0); order as usize + 1];
    let im_abs = z.im.abs();
    let q_abs_ln = -PI * tau.im;
    let (odd, constant) = match kind {
        ThetaKind::T1 | ThetaKind::T2 => (true, 0.0),
        ThetaKind::T3 | ThetaKind::T4 => (false, 1.0),
    };
    out[0] += constant;
    let mut scale = constant;
    let mut small = 0;
    let start = if odd { 0 } else { 1 };
    for n in start..start + policy.max_terms as i64 {
        let (exponent, freq) = if odd {
            let h = n as f64 + 0.5;
            (h * h, 2.0 * h)
        } else {
            let nf = n as f64;
            (nf * nf, 2.0 * nf)
        };
        let alternating = matches!(kind, ThetaKind::T1 | ThetaKind::T4) && n % 2 == 1;
        let sign = if alternating { -2.0 } else { 2.0 };
        let coef = sign * (I * PI * tau * exponent).exp();
        let arg = z * freq;
        let (s, c) = (arg.sin(), arg.cos());
        let use_sin = matches!(kind, ThetaKind::T1);
        let mut fpow = 1.0;
        for (d, slot) in out.iter_mut().enumerate() {
            let rotated = match (use_sin, d % 4) {
                (true, 0) => s,
                (true, 1) => c,
                (true, 2) => -s,
                (true, _) => -c,
                (false, 0) => c,
                (false, 1) => -s,
                (false, 2) => -c,
                (false, _) => s,
            };
            *slot += coef * fpow * rotated;
            fpow *= freq;
        }
        let bound = 2.0 * (q_abs_ln * exponent + freq * im_abs).exp() * freq.powi(order as i32);
        scale += bound;
        if bound <= policy.series_tol * scale {
            small += 1;
            if small >= 3 {
                return Ok(out);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!(
        "theta series {kind:?} at z={z}, τ={tau} exceeded {} terms",
        policy.max_terms
    )))
}

/// `θ₁′(0|τ) = 2 q^{1/4} ∏_{j≥1} (1 − q^{2j})³` with `q = e^{iπτ}`.
pub fn theta1_prime0_product(tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_tau(tau)?;
    let q2 = (2.0 * PI * I * tau).exp();
    let mut prod = C64::new(1.0, 0.0);
    let mut qp = C64::new(1.0, 0.0);
    for _ in 0..policy.max_terms {
        qp *= q2;
        let f = C64::new(1.0, 0.0) - qp;
        prod *= f * f * f;
        if qp.norm() < policy.series_tol {
            return Ok(2.0 * (I * PI * tau / 4.0).exp() * prod);
        }
    }
    Err(Error::Convergence(format!("θ₁′(0) product at τ={tau} did not converge")))
}

/// `(x; q)_∞ = ∏_{j≥0} (1 − x q^j)`.
pub fn q_pochhammer(x: C64, q: C64, policy: &TruncationPolicy) -> Result<C64> {
    if !(q.norm() < 1.0) {
        return Err(Error::Domain(format!("|q| must be < 1, q = {q}")));
    }
    let mut prod = C64::new(1.0, 0.0);
    let mut t = x;
    let mut small = 0;
    for _ in 0..policy.max_terms {
        prod *= C64::new(1.0, 0.0) - t;
        if t.norm() < policy.series_tol {
            small += 1;
            if small >= 3 {
                return Ok(prod);
            }
        } else {
            small = 0;
        }
        t *= q;
    }
    Err(Error::Convergence(format!("(x;q) with x={x}, q={q} did not converge")))
}

/// Triple-product form `θ₁(πz|τ) = i e^{πi(τ/4 − z)} (x;q)(q/x;q)(q;q)`,
/// with `x = e^{2πiz}` and `q = e^{2πiτ}`.
pub fn triple_product_theta1(z: C64, tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_tau(tau)?;
    let q = (2.0 * PI * I * tau).exp();
    let x = (2.0 * PI * I * z).exp();
    let prefactor = I * (PI * I * (tau / 4.0 - z)).exp();
    Ok(prefactor
        * q_pochhammer(x, q, policy)?
        * q_pochhammer(q / x, q, policy)?
        * q_pochhammer(q, q, policy)?)
}

/// Triple-product form `θ₃(πz|τ) = ∏_{n≥1} (1 − qⁿ)(1 + q^{n−1/2} x)(1 + q^{n−1/2}/x)`,
/// with `x = e^{2πiz}` and `q = e^{2πiτ}`.
pub fn triple_product_theta3(z: C64, tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_tau(tau)?;
    let q = (2.0 * PI * I * tau).exp();
    let x = (2.0 * PI * I * z).exp();
    let q_half = (PI * I * tau).exp();
    // (1 + q^{n−1/2}x) = (1 − (−q^{1/2}x) q^{n−1})
    Ok(q_pochhammer(q, q, policy)?
        * q_pochhammer(-q_half * x, q, policy)?
        * q_pochhammer(-q_half / x, q, policy)?)
}
