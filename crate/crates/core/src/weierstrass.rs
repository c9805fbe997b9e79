//! Weierstrass σ, ζ, ℘, ℘′ from their lattice definitions.
//!
//! All work happens on the normalized lattice `{m + nτ}` with `u = z/(2ω₁)`;
//! results are rescaled at the end. The lattice sum runs over the centered
//! square `max(|m|,|n|) ≤ R`, and the points outside the square are added
//! back through their power sums `T₂ⱼ = Σ_{outside} ω^{−2j}`:
//!
//! ```text
//! ln σ  += −Σ_{j≥2} T₂ⱼ u^{2j}/(2j)
//! ζ     += −Σ_{j≥2} T₂ⱼ u^{2j−1}
//! ℘     +=  Σ_{j≥2} (2j−1) T₂ⱼ u^{2j−2}
//! ℘′    +=  Σ_{j≥2} (2j−1)(2j−2) T₂ⱼ u^{2j−3}
//! ```

use std::f64::consts::PI;

use crate::eisenstein::{lattice_sum_delta, square_tail_sums, LatticeParams, TruncationPolicy};
use crate::error::{Error, Result};
use crate::C64;

/// Highest `j` kept in the outside-the-square correction.
const TAIL_TERMS: u32 = 16;

/// Minimum distance to the lattice (normalized units) before a pole error.
const POLE_DISTANCE: f64 = 1e-9;

const GRID: usize = 32;
const NEWTON_MAX: usize = 100;

#[derive(Debug, Clone)]
pub struct WeierstrassContext {
    lattice: LatticeParams,
    policy: TruncationPolicy,
    /// `T₂ⱼ` for `j = 2..=TAIL_TERMS` on the normalized lattice.
    tail: Vec<C64>,
    /// smallest `|m + nτ|` outside the square
    outside_radius: f64,
    e: [C64; 3],
    delta: [C64; 3],
    eta1: C64,
}

impl WeierstrassContext {
    pub fn new(lattice: LatticeParams, policy: TruncationPolicy) -> Result<Self> {
        let tau = lattice.tau();
        let tail = square_tail_sums(tau, policy.lattice_radius, TAIL_TERMS, &policy)?;
        let delta = [
            lattice_sum_delta(1, tau, &policy)?,
            lattice_sum_delta(2, tau, &policy)?,
            lattice_sum_delta(3, tau, &policy)?,
        ];
        let mut ctx = Self {
            lattice,
            policy,
            tail,
            outside_radius: outside_radius(tau, policy.lattice_radius),
            e: [C64::new(0.0, 0.0); 3],
            delta,
            eta1: C64::new(0.0, 0.0),
        };
        let w1 = lattice.omega1();
        let w2 = lattice.omega2();
        ctx.e = [wp(w1, &ctx)?, wp(w2, &ctx)?, wp(w1 + w2, &ctx)?];
        ctx.eta1 = weier_zeta(w1, &ctx)?;
        Ok(ctx)
    }

    /// Normalized lattice `ω₁ = 1/2`, `ω₂ = τ/2` with the default policy.
    pub fn from_tau(tau: C64) -> Result<Self> {
        Self::new(LatticeParams::from_tau(tau)?, TruncationPolicy::default())
    }

    pub fn lattice(&self) -> &LatticeParams {
        &self.lattice
    }
    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }
    pub fn tau(&self) -> C64 {
        self.lattice.tau()
    }
    /// `(e₁, e₂, e₃)` as cached at construction.
    pub fn e_values(&self) -> (C64, C64, C64) {
        (self.e[0], self.e[1], self.e[2])
    }
    /// `δ₂(τ)` of the normalized lattice.
    pub fn delta2(&self) -> C64 {
        self.delta[0]
    }
    pub fn delta4(&self) -> C64 {
        self.delta[1]
    }
    pub fn delta6(&self) -> C64 {
        self.delta[2]
    }
    /// `η₁ = ζ(ω₁)`.
    pub fn eta1(&self) -> C64 {
        self.eta1
    }

    fn scale(&self) -> C64 {
        2.0 * self.lattice.omega1()
    }

    fn check_radius(&self, u: C64) -> Result<()> {
        if !u.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {u}")));
        }
        if u.norm() > 0.25 * self.outside_radius {
            return Err(Error::Convergence(format!(
                "|z/2ω₁| = {} exceeds the tail-correction range {} (raise lattice_radius)",
                u.norm(),
                0.25 * self.outside_radius
            )));
        }
        Ok(())
    }

    /// Lattice coordinates `(a, b)` with `u = a + bτ`.
    fn coords(&self, u: C64) -> (f64, f64) {
        let tau = self.tau();
        let b = u.im / tau.im;
        (u.re - b * tau.re, b)
    }

    fn nearest_lattice_point(&self, u: C64) -> C64 {
        let tau = self.tau();
        let (a, b) = self.coords(u);
        let (a0, b0) = (a.round(), b.round());
        // the rounded point is not always the nearest for skew τ
        let mut best = C64::new(a0, 0.0) + tau * b0;
        for da in -1..=1 {
            for db in -1..=1 {
                let p = C64::new(a0 + da as f64, 0.0) + tau * (b0 + db as f64);
                if (u - p).norm() < (u - best).norm() {
                    best = p;
                }
            }
        }
        best
    }

    /// `u` moved into the cell around the origin, for periodic functions.
    fn reduce(&self, u: C64) -> C64 {
        u - self.nearest_lattice_point(u)
    }

    fn check_pole(&self, z: C64, u: C64, what: &str) -> Result<()> {
        if (u - self.nearest_lattice_point(u)).norm() < POLE_DISTANCE {
            return Err(Error::Pole {
                at: z,
                what: what.to_string(),
            });
        }
        Ok(())
    }

    /// Calls `f(ω²)` for every lattice point in the half-square
    /// (`n > 0`, or `n = 0` and `m > 0`); the other half is `−ω`.
    fn for_half_square(&self, mut f: impl FnMut(C64)) {
        let r = self.policy.lattice_radius as i64;
        let tau = self.tau();
        for n in 0..=r {
            let m_start = if n == 0 { 1 } else { -r };
            let row = tau * n as f64;
            for m in m_start..=r {
                let w = row + m as f64;
                f(w * w);
            }
        }
    }

    fn ln_sigma_normalized(&self, u: C64) -> C64 {
        let u2 = u * u;
        let mut acc = C64::new(0.0, 0.0);
        // pairing ±ω: ln(1−s) + s with s = u²/ω²
        self.for_half_square(|w2| {
            let s = u2 / w2;
            acc += if s.norm() < 0.1 {
                let mut t = s * s;
                let mut sum = C64::new(0.0, 0.0);
                for k in 2..40 {
                    let term = t / k as f64;
                    sum += term;
                    if term.norm() < 1e-18 * sum.norm() {
                        break;
                    }
                    t *= s;
                }
                -sum
            } else {
                (1.0 - s).ln() + s
            };
        });
        let mut p = u2;
        for (i, t) in self.tail.iter().enumerate() {
            let j = (i + 2) as f64;
            p *= u2;
            acc -= t * p / (2.0 * j);
        }
        u.ln() + acc
    }

    fn zeta_normalized(&self, u: C64) -> C64 {
        let u2 = u * u;
        let u3 = u2 * u;
        let mut acc = C64::new(0.0, 0.0);
        // 1/(u−ω) + 1/(u+ω) + 2u/ω² = 2u³/((u²−ω²)ω²)
        self.for_half_square(|w2| acc += 1.0 / ((u2 - w2) * w2));
        acc *= 2.0 * u3;
        let mut p = u;
        for t in &self.tail {
            p *= u2;
            acc -= t * p;
        }
        1.0 / u + acc
    }

    fn wp_normalized(&self, u: C64) -> C64 {
        let u2 = u * u;
        let mut acc = C64::new(0.0, 0.0);
        // 1/(u−ω)² + 1/(u+ω)² − 2/ω² = 2u²(3ω²−u²)/((u²−ω²)²ω²)
        self.for_half_square(|w2| {
            let d = u2 - w2;
            acc += (3.0 * w2 - u2) / (d * d * w2);
        });
        acc *= 2.0 * u2;
        let mut p = C64::new(1.0, 0.0);
        for (i, t) in self.tail.iter().enumerate() {
            let j = (i + 2) as f64;
            p *= u2;
            acc += (2.0 * j - 1.0) * t * p;
        }
        1.0 / u2 + acc
    }

    fn wp_prime_normalized(&self, u: C64) -> C64 {
        let u2 = u * u;
        let mut acc = C64::new(0.0, 0.0);
        // 1/(u−ω)³ + 1/(u+ω)³ = (2u³ + 6uω²)/(u²−ω²)³
        self.for_half_square(|w2| {
            let d = u2 - w2;
            acc += (u2 + 3.0 * w2) / (d * d * d);
        });
        acc *= -4.0 * u;
        let mut p = u;
        for (i, t) in self.tail.iter().enumerate() {
            let j = (i + 2) as f64;
            acc += (2.0 * j - 1.0) * (2.0 * j - 2.0) * t * p;
            p *= u2;
        }
        -2.0 / (u2 * u) + acc
    }
}

fn outside_radius(tau: C64, radius: u32) -> f64 {
    // min |s + tτ| over max(|s|,|t|) = 1, scaled by R + 1
    let mut h = f64::INFINITY;
    for i in 0..=400 {
        let s = -1.0 + 2.0 * i as f64 / 400.0;
        for p in [
            C64::new(s, 0.0) + tau,
            C64::new(1.0, 0.0) + tau * s,
        ] {
            h = h.min(p.norm());
        }
    }
    h * (radius + 1) as f64
}

/// `σ(z)`.
pub fn sigma(z: C64, ctx: &WeierstrassContext) -> Result<C64> {
    let u = z / ctx.scale();
    ctx.check_radius(u)?;
    if u.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(ctx.scale() * ctx.ln_sigma_normalized(u).exp())
}

/// `ζ(z) = σ′(z)/σ(z)`.
pub fn weier_zeta(z: C64, ctx: &WeierstrassContext) -> Result<C64> {
    let u = z / ctx.scale();
    ctx.check_radius(u)?;
    ctx.check_pole(z, u, "weierstrass zeta")?;
    Ok(ctx.zeta_normalized(u) / ctx.scale())
}

/// `℘(z)`.
pub fn wp(z: C64, ctx: &WeierstrassContext) -> Result<C64> {
    let u = z / ctx.scale();
    if !u.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    ctx.check_pole(z, u, "weierstrass p")?;
    let s = ctx.scale();
    Ok(ctx.wp_normalized(ctx.reduce(u)) / (s * s))
}

/// `℘′(z)`.
pub fn wp_prime(z: C64, ctx: &WeierstrassContext) -> Result<C64> {
    let u = z / ctx.scale();
    if !u.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    ctx.check_pole(z, u, "weierstrass p'")?;
    let s = ctx.scale();
    Ok(ctx.wp_prime_normalized(ctx.reduce(u)) / (s * s * s))
}

/// `(e₁, e₂, e₃) = (℘(ω₁), ℘(ω₂), ℘(ω₁+ω₂))`.
pub fn half_period_values(ctx: &WeierstrassContext) -> Result<(C64, C64, C64)> {
    let w1 = ctx.lattice.omega1();
    let w2 = ctx.lattice.omega2();
    Ok((wp(w1, ctx)?, wp(w2, ctx)?, wp(w1 + w2, ctx)?))
}

/// A zero `α₁` of `℘`; the other one is `−α₁` modulo the lattice.
pub fn wp_zero(ctx: &WeierstrassContext) -> Result<C64> {
    Ok(wp_solve(C64::new(0.0, 0.0), ctx)?.0)
}

/// The two solutions `(α₁, α₂)` of `℘(z) = a` in the period cell, `α₂ = −α₁`.
///
/// Newton on `℘ − a` with the analytic `℘′`, started from the smallest
/// `|℘ − a|` on a 32×32 grid. `α₁` is reduced to the cell centered at the
/// origin and chosen with `arg α₁ ∈ [0, π)`.
pub fn wp_solve(a: C64, ctx: &WeierstrassContext) -> Result<(C64, C64)> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("non-finite target {a}")));
    }
    let s = ctx.scale();
    let target = a * s * s;
    let tau = ctx.tau();
    let mut seed = C64::new(0.0, 0.0);
    let mut best = f64::INFINITY;
    for i in 0..GRID {
        for j in 0..GRID {
            let u = C64::new((i as f64 + 0.5) / GRID as f64, 0.0)
                + tau * ((j as f64 + 0.5) / GRID as f64);
            let r = (ctx.wp_normalized(ctx.reduce(u)) - target).norm();
            if r < best {
                best = r;
                seed = u;
            }
        }
    }
    let mut u = ctx.reduce(seed);
    let scale = target.norm().max(1.0);
    for _ in 0..NEWTON_MAX {
        let f = ctx.wp_normalized(u) - target;
        let df = ctx.wp_prime_normalized(u);
        if f.norm() <= 1e-15 * scale {
            return Ok(label(u * s, ctx));
        }
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        u = ctx.reduce(u - step);
        if ctx.nearest_lattice_point(u) == u {
            break;
        }
        if step.norm() <= 1e-15 * u.norm().max(1.0) {
            return Ok(label(u * s, ctx));
        }
    }
    let f = ctx.wp_normalized(u) - target;
    if f.norm() <= 1e-10 * scale {
        return Ok(label(u * s, ctx));
    }
    Err(Error::NonConvergence {
        iterations: NEWTON_MAX,
        what: format!("℘(z) = {a} at τ = {tau}"),
    })
}

fn label(z: C64, ctx: &WeierstrassContext) -> (C64, C64) {
    let s = ctx.scale();
    let u = ctx.reduce(z / s);
    let z = u * s;
    let arg = z.arg();
    let first = if (0.0..PI).contains(&arg) { z } else { -z };
    (first, -first)
}

/// Whether `z − w` is a lattice vector, to within `tol` (normalized units).
pub fn congruent(z: C64, w: C64, ctx: &WeierstrassContext, tol: f64) -> bool {
    let d = (z - w) / ctx.scale();
    (d - ctx.nearest_lattice_point(d)).norm() < tol
}
