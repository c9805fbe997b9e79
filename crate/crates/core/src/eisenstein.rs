//! Lattice sums over `m + nτ` and their half-shifted variants.
//!
//! Every sum here is evaluated row by row: for a fixed row offset `w` the
//! inner sum over `m` has the closed form
//!
//! ```text
//! Σ_m 1/(m+w)^k = (−2πi)^k/(k−1)! · Σ_{r≥1} r^{k−1} e^{2πirw}      (Im w > 0)
//! ```
//!
//! which for `k = 2` is `π²/sin²(πw)`. Rows decay like `e^{−2π|n| Im τ}`, so
//! a few dozen rows reach machine precision. The outer sum always runs over
//! `n` with the inner sum over `m`; for `j = 1` this order is part of the
//! definition, since the double sum is only conditionally convergent.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::theta::{theta_z_derivative, ThetaKind};
use crate::{C64, I};

/// Series, product and lattice cutoffs shared by every evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Half-width of the centered square of lattice points, `max(|m|,|n|)`.
    pub lattice_radius: u32,
    /// Relative stopping threshold for series and products.
    pub series_tol: f64,
    /// Hard cap on series terms / product factors / lattice rows.
    pub max_terms: u32,
}

impl TruncationPolicy {
    pub fn new(lattice_radius: u32, series_tol: f64, max_terms: u32) -> Result<Self> {
        if lattice_radius < 4 {
            return Err(Error::InvalidParameter(format!(
                "lattice_radius must be >= 4, got {lattice_radius}"
            )));
        }
        if !(series_tol >= 16.0 * f64::EPSILON) || !series_tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "series_tol must be >= 16 eps, got {series_tol:e}"
            )));
        }
        if max_terms < 16 {
            return Err(Error::InvalidParameter(format!(
                "max_terms must be >= 16, got {max_terms}"
            )));
        }
        Ok(Self {
            lattice_radius,
            series_tol,
            max_terms,
        })
    }

    pub fn with_radius(self, lattice_radius: u32) -> Result<Self> {
        Self::new(lattice_radius, self.series_tol, self.max_terms)
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            lattice_radius: 60,
            series_tol: 16.0 * f64::EPSILON,
            max_terms: 400,
        }
    }
}

/// Period pair `(2ω₁, 2ω₂)` with derived `τ = ω₂/ω₁` and nome `q = e^{iπτ}`.
///
/// `tau` and `nome_q` are recomputed from the half-periods on construction
/// and cannot be set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    omega1: C64,
    omega2: C64,
    tau: C64,
    nome_q: C64,
}

impl LatticeParams {
    pub fn new(omega1: C64, omega2: C64) -> Result<Self> {
        if omega1.norm() == 0.0 || !omega1.is_finite() || !omega2.is_finite() {
            return Err(Error::Domain(format!(
                "invalid half-periods ω₁={omega1}, ω₂={omega2}"
            )));
        }
        let tau = omega2 / omega1;
        if !(tau.im > 0.0) {
            return Err(Error::Domain(format!("Im τ must be positive, τ = {tau}")));
        }
        let nome_q = (I * PI * tau).exp();
        Ok(Self {
            omega1,
            omega2,
            tau,
            nome_q,
        })
    }

    /// The normalized lattice `ω₁ = 1/2`, `ω₂ = τ/2`.
    pub fn from_tau(tau: C64) -> Result<Self> {
        Self::new(C64::new(0.5, 0.0), tau * 0.5)
    }

    pub fn omega1(&self) -> C64 {
        self.omega1
    }
    pub fn omega2(&self) -> C64 {
        self.omega2
    }
    pub fn tau(&self) -> C64 {
        self.tau
    }
    pub fn nome_q(&self) -> C64 {
        self.nome_q
    }
}

/// Which half-shifted lattice to sum over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfShift {
    /// `m + 1/2 + nτ`
    Alpha,
    /// `m + 1/2 + (n + 1/2)τ`
    Beta,
    /// `m + (n + 1/2)τ`
    Gamma,
}

fn check_tau(tau: C64) -> Result<()> {
    if !(tau.im > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("Im τ must be positive, τ = {tau}")));
    }
    Ok(())
}

/// `ζ(k)` for even `k ≥ 2` by a short direct sum plus Euler–Maclaurin tail.
pub(crate) fn zeta_even(k: u32) -> f64 {
    if k == 2 {
        return PI * PI / 6.0;
    }
    let s = k as f64;
    let m = 30.0_f64;
    let mut sum = 0.0;
    for i in (1..30).rev() {
        sum += (i as f64).powf(-s);
    }
    sum += m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    // Euler–Maclaurin corrections −B_{2i}/(2i)! f^{(2i−1)}(M)
    const B: [f64; 4] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let mut rising = s; // s(s+1)…(s+2i−2)
    let mut fact = 2.0; // (2i)!
    for (i, b) in B.iter().enumerate() {
        sum += b / fact * rising * m.powf(-s - (2 * i + 1) as f64);
        let a = (2 * i + 1) as f64;
        rising *= (s + a) * (s + a + 1.0);
        fact *= (2 * i + 3) as f64 * (2 * i + 4) as f64;
    }
    sum
}

/// `Σ_m 1/(m+w)^k` for even `k ≥ 2` and `Im w ≠ 0`.
pub(crate) fn row_sum(k: u32, w: C64, policy: &TruncationPolicy) -> Result<C64> {
    debug_assert!(k >= 2 && k.is_multiple_of(2));
    // even k: the row is symmetric under w -> -w
    let w = if w.im < 0.0 { -w } else { w };
    if w.im == 0.0 {
        return Err(Error::Domain(format!("row offset {w} is real")));
    }
    let y = (2.0 * PI * I * w).exp();
    if k == 2 {
        let one_minus = C64::new(1.0, 0.0) - y;
        return Ok(-4.0 * PI * PI * y / (one_minus * one_minus));
    }
    // coefficient (−2πi)^k/(k−1)!, built incrementally to stay in range
    let mut coef = C64::new(1.0, 0.0);
    for i in 1..=k {
        coef *= -2.0 * PI * I;
        if i < k {
            coef /= i as f64;
        }
    }
    let ylog = y.norm().ln();
    let peak = (k - 1) as f64 / -ylog;
    let mut acc = C64::new(0.0, 0.0);
    let mut yr = C64::new(1.0, 0.0);
    let mut small = 0;
    for r in 1..=policy.max_terms.max(64) * 8 {
        yr *= y;
        let term = yr * (r as f64).powi(k as i32 - 1);
        acc += term;
        if (r as f64) > peak && term.norm() <= policy.series_tol * acc.norm() {
            small += 1;
            if small >= 3 {
                return Ok(coef * acc);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!(
        "row sum k={k} at w={w} did not converge"
    )))
}

/// Sums rows `2 Σ_{n≥start} row(n)` until three consecutive rows are negligible.
fn sum_rows<F>(first: C64, start: u32, policy: &TruncationPolicy, what: &str, row: F) -> Result<C64>
where
    F: Fn(u32) -> Result<C64>,
{
    let mut total = first;
    let mut small = 0;
    for n in start..start + policy.max_terms {
        let r = 2.0 * row(n)?;
        total += r;
        if r.norm() <= policy.series_tol * total.norm() {
            small += 1;
            if small >= 3 {
                return Ok(total);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence(format!(
        "{what}: rows not negligible after {} rows",
        policy.max_terms
    )))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    kind: u8,
    j: u32,
    re: u64,
    im: u64,
    tol: u64,
    max_terms: u32,
}

fn cache() -> &'static Mutex<HashMap<CacheKey, C64>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, C64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached<F>(kind: u8, j: u32, tau: C64, policy: &TruncationPolicy, compute: F) -> Result<C64>
where
    F: FnOnce() -> Result<C64>,
{
    let key = CacheKey {
        kind,
        j,
        re: tau.re.to_bits(),
        im: tau.im.to_bits(),
        tol: policy.series_tol.to_bits(),
        max_terms: policy.max_terms,
    };
    if let Some(v) = cache().lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let v = compute()?;
    cache().lock().unwrap().insert(key, v);
    Ok(v)
}

/// `δ_{2j}(τ) = Σ_n Σ_{m, (m,n)≠(0,0)} 1/(m+nτ)^{2j}`.
///
/// For `j = 1` the sum is conditionally convergent and the order above
/// (outer `n`, inner `m`) is the one used; swapping it changes the value by
/// `−2πi/τ` (see [`lattice_sum_delta2_swapped`]).
pub fn lattice_sum_delta(j: u32, tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_tau(tau)?;
    if j == 0 {
        return Err(Error::Domain("j must be >= 1".into()));
    }
    cached(0, j, tau, policy, || {
        let k = 2 * j;
        let first = C64::new(2.0 * zeta_even(k), 0.0);
        sum_rows(first, 1, policy, "delta", |n| row_sum(k, tau * n as f64, policy))
    })
}

/// `α_{2j}`, `β_{2j}` or `γ_{2j}`: the lattice sum over a half-shifted lattice.
/// Same summation order as [`lattice_sum_delta`].
pub fn half_shift_sum(kind: HalfShift, j: u32, tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_tau(tau)?;
    if j == 0 {
        return Err(Error::Domain("j must be >= 1".into()));
    }
    let k = 2 * j;
    let half = C64::new(0.5, 0.0);
    match kind {
        HalfShift::Alpha => cached(1, j, tau, policy, || {
            // n = 0 row: Σ_m (m+1/2)^{-k} = 2(2^k − 1)ζ(k)
            let first = C64::new(2.0 * (2f64.powi(k as i32) - 1.0) * zeta_even(k), 0.0);
            sum_rows(first, 1, policy, "alpha", |n| {
                row_sum(k, half + tau * n as f64, policy)
            })
        }),
        HalfShift::Beta => cached(2, j, tau, policy, || {
            sum_rows(C64::new(0.0, 0.0), 0, policy, "beta", |n| {
                row_sum(k, half + tau * (n as f64 + 0.5), policy)
            })
        }),
        HalfShift::Gamma => cached(3, j, tau, policy, || {
            sum_rows(C64::new(0.0, 0.0), 0, policy, "gamma", |n| {
                row_sum(k, tau * (n as f64 + 0.5), policy)
            })
        }),
    }
}

/// `Σ_m Σ_n 1/(m+nτ)²` with the order swapped (outer `m`, inner `n`).
/// Equals `δ₂(τ) − 2πi/τ`.
pub fn lattice_sum_delta2_swapped(tau: C64, policy: &TruncationPolicy) -> Result<C64> {
    check_tau(tau)?;
    cached(4, 1, tau, policy, || {
        let inv_tau2 = 1.0 / (tau * tau);
        // inner n-sum of row m: τ^{-2} Σ_n 1/(n + m/τ)^2
        let first = C64::new(2.0 * zeta_even(2), 0.0) * inv_tau2;
        sum_rows(first, 1, policy, "swapped delta2", |m| {
            Ok(inv_tau2 * row_sum(2, m as f64 / tau, policy)?)
        })
    })
}

/// Direct truncation of `δ_{2j}` over `0 < max(|m|,|n|) ≤ radius`, together
/// with an integral-comparison bound on the omitted tail (`j ≥ 2`).
pub fn lattice_sum_direct(j: u32, tau: C64, radius: u32) -> Result<(C64, f64)> {
    check_tau(tau)?;
    if j < 2 {
        return Err(Error::Domain(
            "direct truncation needs absolute convergence (j >= 2)".into(),
        ));
    }
    let sum = truncated_square_sums(tau, radius, j)?[(j - 2) as usize];
    Ok((sum, direct_tail_bound(j, tau, radius)))
}

/// Upper bound for `Σ |ω|^{-2j}` over lattice points outside the square.
pub fn direct_tail_bound(j: u32, tau: C64, radius: u32) -> f64 {
    let k = 2.0 * j as f64;
    // smallest |s + tτ| on the boundary of the unit square max(|s|,|t|) = 1
    let mut h = f64::INFINITY;
    for i in 0..=400 {
        let s = -1.0 + 2.0 * i as f64 / 400.0;
        for p in [
            C64::new(s, 0.0) + tau,
            C64::new(s, 0.0) - tau,
            C64::new(1.0, 0.0) + tau * s,
            C64::new(-1.0, 0.0) + tau * s,
        ] {
            h = h.min(p.norm());
        }
    }
    let cell_diam = (C64::new(1.0, 0.0) + tau).norm().max((C64::new(1.0, 0.0) - tau).norm());
    let r0 = (h * radius as f64 - cell_diam).max(1e-3);
    2.0 * PI / (tau.im * (k - 2.0) * r0.powf(k - 2.0))
}

/// `Σ_{0<max(|m|,|n|)≤R} (m+nτ)^{-2j}` for `j = 2..=j_max`, one pass over the
/// square. Pairs `ω`, `−ω` are combined so odd powers never enter.
pub(crate) fn truncated_square_sums(tau: C64, radius: u32, j_max: u32) -> Result<Vec<C64>> {
    check_tau(tau)?;
    let r = radius as i64;
    let count = (j_max.max(2) - 1) as usize;
    let mut sums = vec![C64::new(0.0, 0.0); count];
    // half-plane: n > 0, or n == 0 and m > 0; each term doubled
    for n in 0..=r {
        let m_start = if n == 0 { 1 } else { -r };
        for m in m_start..=r {
            let w = C64::new(m as f64, 0.0) + tau * n as f64;
            let inv2 = 1.0 / (w * w);
            let mut p = inv2;
            for s in sums.iter_mut() {
                p *= inv2;
                *s += 2.0 * p;
            }
        }
    }
    Ok(sums)
}

/// `Σ (m+nτ)^{-2j}` over the lattice points outside the square
/// `max(|m|,|n|) ≤ R`, for `j = 2..=j_max`.
///
/// Rows `|n| ≤ R` contribute their `|m| > R` tails (a few explicit terms,
/// then Euler–Maclaurin); rows `|n| > R` are summed in closed form. No
/// square partial sum is subtracted, so small tails keep full relative
/// accuracy.
pub(crate) fn square_tail_sums(
    tau: C64,
    radius: u32,
    j_max: u32,
    policy: &TruncationPolicy,
) -> Result<Vec<C64>> {
    check_tau(tau)?;
    let r = radius as i64;
    (2..=j_max)
        .map(|j| {
            let k = 2 * j;
            let mut inner = row_tail(k, C64::new(0.0, 0.0), r);
            for n in 1..=r {
                inner += 2.0 * row_tail(k, tau * n as f64, r);
            }
            let mut outer = C64::new(0.0, 0.0);
            let mut small = 0;
            for n in (r + 1)..(r + 1 + policy.max_terms as i64) {
                let row = 2.0 * row_sum(k, tau * n as f64, policy)?;
                outer += row;
                if row.norm() <= policy.series_tol * (inner + outer).norm() {
                    small += 1;
                    if small >= 3 {
                        return Ok(inner + outer);
                    }
                } else {
                    small = 0;
                }
            }
            Err(Error::Convergence(format!(
                "square tail rows at τ={tau} not negligible after {} rows",
                policy.max_terms
            )))
        })
        .collect()
}

/// `Σ_{|m|>R} (m+w)^{-k}` for even `k`.
fn row_tail(k: u32, w: C64, r: i64) -> C64 {
    const EXPLICIT: i64 = 24;
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let ki = k as i32;
    let mut acc = C64::new(0.0, 0.0);
    // (−m+w)^k = (m−w)^k, so both sides are sums over m > R
    for v in [w, -w] {
        for m in (r + 1)..(r + 1 + EXPLICIT) {
            acc += (C64::new(m as f64, 0.0) + v).powi(-ki);
        }
        let x = C64::new((r + 1 + EXPLICIT) as f64, 0.0) + v;
        let inv = 1.0 / x;
        let base = x.powi(-ki);
        acc += base * x / (k - 1) as f64 + 0.5 * base;
        // −B_{2i}/(2i)! f^{(2i−1)}(x),  f^{(p)} = (−1)^p k(k+1)…(k+p−1) x^{−k−p}
        let mut rising = k as f64;
        let mut fact = 2.0;
        let mut p = base * inv;
        for (i, b) in B.iter().enumerate() {
            acc += b / fact * rising * p;
            let a = (2 * i + 1) as f64;
            rising *= (k as f64 + a) * (k as f64 + a + 1.0);
            fact *= (2 * i + 3) as f64 * (2 * i + 4) as f64;
            p *= inv * inv;
        }
    }
    acc
}

/// Extends `δ₄, δ₆` to `δ₈, δ₁₀, …, δ_{2 j_max}` through the quadratic
/// recursion for `d_k = (2k+3) k! δ_{2k+4}`:
///
/// ```text
/// Σ_{k=0}^{n} C(n,k) d_k d_{n−k} = (2n+9)/(3n+6) · d_{n+2}
/// ```
pub fn delta_from_recursion(j_max: u32, delta4: C64, delta6: C64) -> Result<Vec<C64>> {
    if j_max < 4 {
        return Err(Error::InvalidParameter(format!("j_max must be >= 4, got {j_max}")));
    }
    if j_max > 64 {
        return Err(Error::InvalidParameter(format!(
            "j_max = {j_max} exceeds the overflow guard (64)"
        )));
    }
    let top = (j_max - 2) as usize; // d index for δ_{2 j_max}
    let mut fact = vec![1.0f64; top + 1];
    for k in 1..=top {
        fact[k] = fact[k - 1] * k as f64;
    }
    let mut d = vec![C64::new(0.0, 0.0); top + 1];
    d[0] = 3.0 * delta4;
    d[1] = 5.0 * delta6;
    for n in 0..=(top - 2) {
        let mut acc = C64::new(0.0, 0.0);
        let mut binom: u128 = 1;
        for k in 0..=n {
            acc += binom as f64 * d[k] * d[n - k];
            binom = binom * (n - k) as u128 / (k + 1) as u128;
        }
        let num = (3 * n + 6) as u64;
        let den = (2 * n + 9) as u64;
        d[n + 2] = acc * (num as f64 / den as f64);
    }
    Ok((2..=top)
        .map(|k| d[k] / ((2 * k + 3) as f64 * fact[k]))
        .collect())
}

/// `δ₂(τ) = −π² θ₁‴(0|τ) / (3 θ₁′(0|τ))`, independent of any lattice sum.
pub fn delta2_from_theta(tau: C64) -> Result<C64> {
    let policy = TruncationPolicy::default();
    let d1 = theta_z_derivative(ThetaKind::T1, 1, C64::new(0.0, 0.0), tau, &policy)?;
    let d3 = theta_z_derivative(ThetaKind::T1, 3, C64::new(0.0, 0.0), tau, &policy)?;
    Ok(-PI * PI * d3 / (3.0 * d1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn delta6_vanishes_on_square_lattice() {
        let p = TruncationPolicy::default();
        let v = lattice_sum_delta(3, c(0.0, 1.0), &p).unwrap();
        assert!(v.norm() < 1e-12, "{v}");
    }

    #[test]
    fn zeta_even_matches_closed_forms() {
        let e4 = zeta_even(4) - PI.powi(4) / 90.0;
        assert!(e4.abs() < 1e-15, "{e4:e}");
        assert!((zeta_even(6) - PI.powi(6) / 945.0).abs() < 1e-15);
        assert!((zeta_even(8) - PI.powi(8) / 9450.0).abs() < 1e-15);
    }

    #[test]
    fn delta2_row_form_matches_theta_route() {
        let p = TruncationPolicy::default();
        for tau in [c(0.0, 2.0), c(0.0, 1.0), c(0.3, 1.1), c(-0.4, 0.9)] {
            let a = lattice_sum_delta(1, tau, &p).unwrap();
            let b = delta2_from_theta(tau).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "{tau}: {a} vs {b}");
        }
    }

    #[test]
    fn delta2_is_real_on_square_lattice() {
        let v = delta2_from_theta(c(0.0, 1.0)).unwrap();
        assert!(v.im.abs() < 1e-12);
        // δ₂(i) = π (Legendre relation on the square lattice)
        assert!((v.re - PI).abs() < 1e-12, "{v}");
    }

    #[test]
    fn gamma_and_alpha_agree_on_square_lattice() {
        let p = TruncationPolicy::default();
        let a = half_shift_sum(HalfShift::Alpha, 2, c(0.0, 1.0), &p).unwrap();
        let g = half_shift_sum(HalfShift::Gamma, 2, c(0.0, 1.0), &p).unwrap();
        assert!((a - g).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn triple_half_shift_relation() {
        let p = TruncationPolicy::default();
        let tau = c(0.0, 1.5);
        let s = half_shift_sum(HalfShift::Alpha, 1, tau, &p).unwrap()
            + half_shift_sum(HalfShift::Beta, 1, tau, &p).unwrap()
            + half_shift_sum(HalfShift::Gamma, 1, tau, &p).unwrap();
        let d = lattice_sum_delta(1, tau, &p).unwrap();
        assert!((s - 3.0 * d).norm() < 1e-10 * d.norm());
    }

    #[test]
    fn recursion_closed_forms() {
        let d4 = c(1.3, -0.2);
        let d6 = c(0.4, 0.9);
        let v = delta_from_recursion(5, d4, d6).unwrap();
        assert!((v[0] - 3.0 / 7.0 * d4 * d4).norm() < 1e-15);
        assert!((v[1] - 5.0 / 11.0 * d4 * d6).norm() < 1e-15);
        let z = delta_from_recursion(4, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(z, vec![c(0.0, 0.0)]);
    }

    #[test]
    fn recursion_guards() {
        assert!(delta_from_recursion(3, c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(delta_from_recursion(65, c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(delta_from_recursion(64, c(1.0, 0.0), c(1.0, 0.0)).is_ok());
    }

    #[test]
    fn domain_errors() {
        let p = TruncationPolicy::default();
        assert!(matches!(lattice_sum_delta(2, c(0.0, -1.0), &p), Err(Error::Domain(_))));
        assert!(matches!(lattice_sum_delta(2, c(1.0, 0.0), &p), Err(Error::Domain(_))));
        assert!(LatticeParams::new(c(0.5, 0.0), c(0.0, -0.3)).is_err());
    }

    #[test]
    fn policy_invariants() {
        assert!(TruncationPolicy::new(3, 1e-14, 100).is_err());
        assert!(TruncationPolicy::new(8, 1e-17, 100).is_err());
        assert!(TruncationPolicy::new(8, 1e-14, 15).is_err());
        assert!(TruncationPolicy::new(8, 1e-14, 16).is_ok());
    }

    #[test]
    fn lattice_params_derive_tau_and_nome() {
        let l = LatticeParams::new(c(1.0, 0.0), c(0.0, 1.2)).unwrap();
        assert!((l.tau() - c(0.0, 1.2)).norm() < 1e-15);
        assert!((l.nome_q() - c((-1.2 * PI).exp(), 0.0)).norm() < 1e-15);
    }
    #[test]
    fn square_tail_completes_delta() {
        let p = TruncationPolicy::default();
        for tau in [c(0.0, 1.0), c(0.3, 1.1), c(-0.4, 0.9)] {
            let sq = truncated_square_sums(tau, 12, 5).unwrap();
            let tail = square_tail_sums(tau, 12, 5, &p).unwrap();
            for j in 2..=5u32 {
                let full = lattice_sum_delta(j, tau, &p).unwrap();
                let got = sq[(j - 2) as usize] + tail[(j - 2) as usize];
                assert!((got - full).norm() < 1e-14 * full.norm().max(1.0), "{tau} {j}");
            }
        }
    }

}
