//! The case list. Each side of an identity is an independent evaluation
//! path; constants are never derived from the other side.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use super::{grid_distance, real_grid_distance, Binding, CellScale, Evaluator, IdentityCase, SampleSpec, TauGrid};
use crate::eisenstein::{
    delta_from_recursion, half_shift_sum, lattice_sum_delta, lattice_sum_delta2_swapped, HalfShift, LatticeParams,
};
use crate::error::Result;
use crate::gammatrig::{digamma, gamma_fn, sine_product, trigamma, GammaEvalConfig, EULER_GAMMA};
use crate::lemma_engine::{fit_log_polynomial, FunctionHandle, Region};
use crate::theta::{
    theta, theta1_prime0_product, theta_series, theta_z_derivative, triple_product_theta1, triple_product_theta3,
    ThetaKind,
};
use crate::weierstrass::{sigma, weier_zeta, wp, wp_prime, wp_solve, WeierstrassContext};
use crate::{C64, I};

use ThetaKind::{T1, T2, T3, T4};

const SAMPLES: usize = 10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn zero() -> C64 {
    c(0.0, 0.0)
}

fn ev<F>(f: F) -> Evaluator
where
    F: Fn(&Binding, C64) -> Result<C64> + Send + Sync + 'static,
{
    Arc::new(f)
}

/// A case with one default binding, no `τ`, a scalar sample and tolerance 1e−10.
fn base<L, R>(id: &str, citation: &str, lhs: L, rhs: R) -> IdentityCase
where
    L: Fn(&Binding, C64) -> Result<C64> + Send + Sync + 'static,
    R: Fn(&Binding, C64) -> Result<C64> + Send + Sync + 'static,
{
    IdentityCase {
        id: id.into(),
        citation: citation.into(),
        lhs: ev(lhs),
        rhs: ev(rhs),
        variants: vec![Binding::default()],
        tau_grid: TauGrid::Unused,
        sample_spec: SampleSpec::scalar(),
        tolerance: 1e-10,
        floor: super::REL_FLOOR,
        erratum_note: None,
    }
}

fn ns(values: &[u32]) -> Vec<Binding> {
    values.iter().map(|&n| Binding::with_n(n)).collect()
}

fn ls(values: &[u32]) -> Vec<Binding> {
    values.iter().map(|&l| Binding::with_l(l)).collect()
}

fn general_omega1() -> C64 {
    C64::from_polar(0.7, 0.2)
}

// ---------------------------------------------------------------- helpers

fn gcfg() -> GammaEvalConfig {
    GammaEvalConfig::default()
}

fn th(kind: ThetaKind, z: C64, b: &Binding) -> Result<C64> {
    theta(kind, z, b.tau, &b.policy)
}

fn th1p(tau: C64, b: &Binding) -> Result<C64> {
    theta_z_derivative(T1, 1, zero(), tau, &b.policy)
}

fn th1ppp(tau: C64, b: &Binding) -> Result<C64> {
    theta_z_derivative(T1, 3, zero(), tau, &b.policy)
}

fn theta_consts(b: &Binding) -> Result<C64> {
    Ok(th(T2, zero(), b)? * th(T3, zero(), b)? * th(T4, zero(), b)?)
}

type Key = [u64; 7];

fn key(b: &Binding) -> Key {
    [
        b.tau.re.to_bits(),
        b.tau.im.to_bits(),
        b.omega1.re.to_bits(),
        b.omega1.im.to_bits(),
        u64::from(b.policy.lattice_radius),
        b.policy.series_tol.to_bits(),
        u64::from(b.policy.max_terms),
    ]
}

/// Weierstrass context for the lattice `(ω₁, τω₁)` of a binding, built once.
fn wctx(b: &Binding) -> Result<Arc<WeierstrassContext>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<WeierstrassContext>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let k = key(b);
    if let Some(ctx) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&k) {
        return Ok(ctx.clone());
    }
    let lattice = LatticeParams::new(b.omega1, b.omega1 * b.tau)?;
    let ctx = Arc::new(WeierstrassContext::new(lattice, b.policy)?);
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(k, ctx.clone());
    Ok(ctx)
}

type AlphaCache = HashMap<(Key, [u64; 2]), (C64, C64)>;

/// Solutions of `℘(z) = b.a`, cached per binding.
fn alphas(b: &Binding) -> Result<(C64, C64)> {
    static CACHE: OnceLock<Mutex<AlphaCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let k = (key(b), [b.a.re.to_bits(), b.a.im.to_bits()]);
    if let Some(&v) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&k) {
        return Ok(v);
    }
    let v = wp_solve(b.a, &*wctx(b)?)?;
    cache.lock().unwrap_or_else(|e| e.into_inner()).insert(k, v);
    Ok(v)
}

fn with_tau(b: &Binding, tau: C64) -> Binding {
    Binding { tau, ..*b }
}

/// Normalized lattice coordinate `z/(2ω₁)`.
fn unit(b: &Binding, z: C64) -> C64 {
    z / (2.0 * b.omega1)
}

fn off_lattice(p: u32, r: u32) -> impl Fn(&Binding, C64, f64) -> bool + Send + Sync + 'static {
    move |b, z, e| grid_distance(unit(b, z), b.tau, p, r) > e
}

fn off_theta_lattice(p: u32, r: u32) -> impl Fn(&Binding, C64, f64) -> bool + Send + Sync + 'static {
    move |b, z, e| grid_distance(z / PI, b.tau, p, r) > e
}

fn trig_box() -> SampleSpec {
    SampleSpec::boxed(c(-1.4, -0.6), c(1.4, 0.6), SAMPLES)
        .excluding(0.05, |b, z, e| real_grid_distance(z, PI / b.n as f64) > e)
}

fn theta_cell(p: u32, r: u32) -> SampleSpec {
    SampleSpec::cell(CellScale::Pi, -0.45, 0.45, SAMPLES).excluding(0.03, off_theta_lattice(p, r))
}

fn weier_cell(p: u32, r: u32) -> SampleSpec {
    SampleSpec::cell(CellScale::TwoOmega1, -0.45, 0.45, SAMPLES).excluding(0.05, off_lattice(p, r))
}

fn sin_shifts(z: C64, n: u32) -> impl Iterator<Item = C64> {
    (0..n).map(move |k| (z + k as f64 * PI / n as f64).sin())
}

// ---------------------------------------------------------------- catalog

/// All identity cases, in report order.
pub fn build_catalog() -> Vec<IdentityCase> {
    let mut out = Vec::new();
    out.extend(gamma_cases());
    out.extend(trig_cases());
    out.extend(theta_cases());
    out.extend(eisenstein_cases());
    out.extend(weierstrass_cases());
    out.extend(ntuple_cases());
    out.extend(modular_cases());
    out
}

fn gamma_box(step: fn(&Binding) -> f64) -> SampleSpec {
    SampleSpec::boxed(c(-1.2, -0.8), c(1.8, 0.8), SAMPLES)
        .excluding(0.05, move |b, z, e| real_grid_distance(z, step(b)) > e)
}

fn gamma_cases() -> Vec<IdentityCase> {
    let per_n: fn(&Binding) -> f64 = |b| 1.0 / b.n as f64;
    vec![
        IdentityCase {
            sample_spec: gamma_box(|_| 0.5),
            ..base(
                "EQ3",
                "Γ(z)Γ(z+1/2) = 2^{1−2z}√π Γ(2z)",
                |_, z| Ok(gamma_fn(z, &gcfg())? * gamma_fn(z + 0.5, &gcfg())?),
                |_, z| Ok(((1.0 - 2.0 * z) * LN_2).exp() * PI.sqrt() * gamma_fn(2.0 * z, &gcfg())?),
            )
        },
        IdentityCase {
            sample_spec: SampleSpec::boxed(c(-2.4, -1.0), c(2.4, 1.0), SAMPLES)
                .excluding(0.05, |_, z, e| real_grid_distance(z, 1.0) > e),
            ..base(
                "EQ4",
                "Γ(1−z)Γ(z) = π/sin(πz)",
                |_, z| Ok(gamma_fn(1.0 - z, &gcfg())? * gamma_fn(z, &gcfg())?),
                |_, z| Ok(PI / (PI * z).sin()),
            )
        },
        IdentityCase {
            variants: ns(&[2, 3, 4, 5]),
            sample_spec: gamma_box(per_n),
            ..base(
                "EQ5",
                "∏_{k=0}^{n−1} Γ(z+k/n) = (2π)^{(n−1)/2} n^{1/2−nz} Γ(nz)",
                |b, z| {
                    let n = b.n as f64;
                    (0..b.n).try_fold(c(1.0, 0.0), |acc, k| Ok(acc * gamma_fn(z + k as f64 / n, &gcfg())?))
                },
                |b, z| {
                    let n = b.n as f64;
                    let pre = (2.0 * PI).powf((n - 1.0) / 2.0) * ((0.5 - n * z) * n.ln()).exp();
                    Ok(pre * gamma_fn(n * z, &gcfg())?)
                },
            )
        },
        IdentityCase {
            variants: ns(&[2, 3, 5]),
            sample_spec: gamma_box(per_n),
            ..base(
                "PSI_NTUPLE",
                "Σ_{k=0}^{n−1} ψ(z+k/n) = nψ(nz) − n ln n",
                |b, z| {
                    let n = b.n as f64;
                    (0..b.n).try_fold(zero(), |acc, k| Ok(acc + digamma(z + k as f64 / n, &gcfg())?))
                },
                |b, z| {
                    let n = b.n as f64;
                    Ok(n * digamma(n * z, &gcfg())? - n * n.ln())
                },
            )
        },
        IdentityCase {
            variants: ns(&[2, 3, 5]),
            sample_spec: gamma_box(per_n),
            ..base(
                "PSI1_NTUPLE",
                "Σ_{k=0}^{n−1} ψ′(z+k/n) = n²ψ′(nz)",
                |b, z| {
                    let n = b.n as f64;
                    (0..b.n).try_fold(zero(), |acc, k| Ok(acc + trigamma(z + k as f64 / n, &gcfg())?))
                },
                |b, z| {
                    let n = b.n as f64;
                    Ok(n * n * trigamma(n * z, &gcfg())?)
                },
            )
        },
        IdentityCase {
            sample_spec: SampleSpec::boxed(c(-2.4, -1.0), c(2.4, 1.0), SAMPLES)
                .excluding(0.05, |_, z, e| real_grid_distance(z, 1.0) > e),
            erratum_note: Some(
                "−π²/cos(πz) on the right is a misprint; differentiating \
                 ψ(1−z) − ψ(z) = π cot(πz) gives π²/sin²(πz)"
                    .into(),
            ),
            ..base(
                "PSI1_REFLECT",
                "ψ′(1−z) + ψ′(z) = π²/sin²(πz)",
                |_, z| Ok(trigamma(1.0 - z, &gcfg())? + trigamma(z, &gcfg())?),
                |_, z| {
                    let s = (PI * z).sin();
                    Ok(PI * PI / (s * s))
                },
            )
        },
        IdentityCase {
            variants: ns(&[3, 5]),
            tolerance: 1e-11,
            ..base(
                "GAUSS_PSI",
                "Σ_{k=1}^{n} ψ(k/n) = −n(γ + ln n)",
                |b, _| {
                    let n = b.n as f64;
                    (1..=b.n).try_fold(zero(), |acc, k| Ok(acc + digamma(c(k as f64 / n, 0.0), &gcfg())?))
                },
                |b, _| {
                    let n = b.n as f64;
                    Ok(c(-n * (EULER_GAMMA + n.ln()), 0.0))
                },
            )
        },
        IdentityCase {
            variants: ns(&[2, 3, 4, 6]),
            tolerance: 1e-12,
            ..base(
                "EULER_SINE",
                "∏_{k=1}^{n−1} sin(kπ/n) = n/2^{n−1}",
                |b, _| Ok(c(sine_product(b.n), 0.0)),
                |b, _| Ok(c(b.n as f64 / 2f64.powi(b.n as i32 - 1), 0.0)),
            )
        },
    ]
}

fn trig_cases() -> Vec<IdentityCase> {
    let trig = |id: &str, citation: &str, lhs: Evaluator, rhs: Evaluator| IdentityCase {
        lhs,
        rhs,
        variants: ns(&[2, 3, 4, 6]),
        sample_spec: trig_box(),
        ..base(id, citation, |_, _| Ok(zero()), |_, _| Ok(zero()))
    };
    let mut eq7 = trig(
        "EQ7",
        "Σ_{k=0}^{n−1} cot(z+πk/n) = n cot(nz)",
        ev(|b, z| Ok(sin_shifts(z, b.n).zip(0..b.n).map(|(s, k)| (z + k as f64 * PI / b.n as f64).cos() / s).sum())),
        ev(|b, z| {
            let n = b.n as f64;
            Ok(n * (n * z).cos() / (n * z).sin())
        }),
    );
    eq7.erratum_note = Some(
        "the right side without the factor n is a misprint; n·cot(nz) is the logarithmic derivative \
         of the sine n-tuple product and differentiates to the reciprocal-square sum"
            .into(),
    );
    vec![
        trig(
            "EQ6",
            "Σ_{k=0}^{n−1} 1/sin²(z+πk/n) = n²/sin²(nz)",
            ev(|b, z| Ok(sin_shifts(z, b.n).map(|s| 1.0 / (s * s)).sum())),
            ev(|b, z| {
                let n = b.n as f64;
                let s = (n * z).sin();
                Ok(n * n / (s * s))
            }),
        ),
        eq7,
        trig(
            "EQ8",
            "∏_{k=0}^{n−1} sin(z+kπ/n) = C₁(n) sin(nz), C₁(n) = (1/n)∏_{k=1}^{n−1} sin(kπ/n)",
            ev(|b, z| Ok(sin_shifts(z, b.n).product())),
            ev(|b, z| Ok(sine_product(b.n) / b.n as f64 * (b.n as f64 * z).sin())),
        ),
        trig(
            "EQ9",
            "∏_{k=0}^{n−1} sin(z+kπ/n) = 2^{1−n} sin(nz)",
            ev(|b, z| Ok(sin_shifts(z, b.n).product())),
            ev(|b, z| Ok(2f64.powi(1 - b.n as i32) * (b.n as f64 * z).sin())),
        ),
        trig(
            "EQ10",
            "∏_{k=0}^{n−1} sin²(z+kπ/n) = n² 2^{2−2n} / Σ_{k=0}^{n−1} sin^{−2}(z+kπ/n)",
            ev(|b, z| Ok(sin_shifts(z, b.n).map(|s| s * s).product())),
            ev(|b, z| {
                let n = b.n as f64;
                let sum: C64 = sin_shifts(z, b.n).map(|s| 1.0 / (s * s)).sum();
                Ok(n * n * 2f64.powi(2 - 2 * b.n as i32) / sum)
            }),
        ),
    ]
}

fn theta_cases() -> Vec<IdentityCase> {
    vec![
        IdentityCase {
            variants: vec![
                Binding::with_shift(1, 0),
                Binding::with_shift(0, 1),
                Binding::with_shift(1, 1),
                Binding::with_shift(2, -1),
            ],
            tau_grid: TauGrid::Sweep,
            sample_spec: theta_cell(1, 1),
            ..base(
                "EQ12",
                "θ₁(z+(m+nτ)π|τ) = (−1)^{m+n} q^{−n²} e^{−2inz} θ₁(z|τ)",
                |b, z| {
                    let (m, n) = b.shift;
                    theta_series(T1, z + (m as f64 + n as f64 * b.tau) * PI, b.tau, &b.policy)
                },
                |b, z| {
                    let (m, n) = b.shift;
                    let nf = n as f64;
                    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let mult = (-I * PI * b.tau * nf * nf - 2.0 * I * nf * z).exp();
                    Ok(sign * mult * theta_series(T1, z, b.tau, &b.policy)?)
                },
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            ..base(
                "EQ15",
                "δ₂ = −π²θ₁‴(0|τ)/(3θ₁′(0|τ))",
                |b, _| lattice_sum_delta(1, b.tau, &b.policy),
                |b, _| Ok(-PI * PI * th1ppp(b.tau, b)? / (3.0 * th1p(b.tau, b)?)),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            ..base(
                "EQ21",
                "θ₁′(0|τ) = 2q^{1/4} ∏_{j≥1} (1−q^{2j})³",
                |b, _| th1p(b.tau, b),
                |b, _| theta1_prime0_product(b.tau, &b.policy),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            ..base(
                "EQ24",
                "θ₁′(0|τ) = θ₂(0|τ)θ₃(0|τ)θ₄(0|τ)",
                |b, _| th1p(b.tau, b),
                |b, _| theta_consts(b),
            )
        },
    ]
}

fn eisenstein_cases() -> Vec<IdentityCase> {
    vec![
        IdentityCase {
            variants: ns(&[4, 5, 6]),
            tau_grid: TauGrid::Sweep,
            tolerance: 1e-8,
            // δ₁₀ vanishes identically on the square lattice; δ₂ⱼ is O(1) otherwise
            floor: 1e-6,
            ..base(
                "EQ23",
                "Σ_{k=0}^{n} C(n,k) d_k d_{n−k} = (2n+9)/(3n+6) d_{n+2}, d_k = (2k+3) k! δ_{2k+4}",
                |b, _| {
                    let d4 = lattice_sum_delta(2, b.tau, &b.policy)?;
                    let d6 = lattice_sum_delta(3, b.tau, &b.policy)?;
                    Ok(delta_from_recursion(b.n, d4, d6)?[(b.n - 4) as usize])
                },
                |b, _| lattice_sum_delta(b.n, b.tau, &b.policy),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            tolerance: 1e-9,
            ..base(
                "DELTA2_TRIPLE",
                "3δ₂ = α₂ + β₂ + γ₂",
                |b, _| Ok(3.0 * lattice_sum_delta(1, b.tau, &b.policy)?),
                |b, _| {
                    let p = &b.policy;
                    Ok(half_shift_sum(HalfShift::Alpha, 1, b.tau, p)?
                        + half_shift_sum(HalfShift::Beta, 1, b.tau, p)?
                        + half_shift_sum(HalfShift::Gamma, 1, b.tau, p)?)
                },
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            tolerance: 1e-8,
            ..base(
                "DELTA2_SWAPPED",
                "Σ_m Σ_n 1/(m+nτ)² = δ₂(τ) − 2πi/τ",
                |b, _| lattice_sum_delta2_swapped(b.tau, &b.policy),
                |b, _| Ok(lattice_sum_delta(1, b.tau, &b.policy)? - 2.0 * PI * I / b.tau),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            tolerance: 1e-8,
            ..base(
                "EQ44_ORDER",
                "δ₂(−1/τ) = τ² Σ_n Σ_m 1/(mτ+n)²",
                |b, _| lattice_sum_delta(1, -1.0 / b.tau, &b.policy),
                |b, _| Ok(b.tau * b.tau * lattice_sum_delta2_swapped(b.tau, &b.policy)?),
            )
        },
    ]
}

fn sigma_at(b: &Binding, z: C64) -> Result<C64> {
    sigma(z, &*wctx(b)?)
}

fn wp_at(b: &Binding, z: C64) -> Result<C64> {
    wp(z, &*wctx(b)?)
}

fn wpp_at(b: &Binding, z: C64) -> Result<C64> {
    wp_prime(z, &*wctx(b)?)
}

/// `θ₁(πz/(2ω₁))`.
fn th1_scaled(b: &Binding, z: C64) -> Result<C64> {
    th(T1, PI * unit(b, z), b)
}

/// Right-hand side of the two-zero factorization of `℘ − a`.
fn two_zero_form(b: &Binding, z: C64) -> Result<C64> {
    let (a1, a2) = alphas(b)?;
    let w1 = b.omega1;
    let t1p = th1p(b.tau, b)?;
    let cst = PI * PI / (4.0 * w1 * w1) * t1p * t1p / (th1_scaled(b, a1)? * th1_scaled(b, a2)?);
    let d = th1_scaled(b, z)?;
    Ok(cst * th(T1, PI * unit(b, z - a1), b)? * th(T1, PI * unit(b, z - a2), b)? / (d * d))
}

fn weierstrass_cases() -> Vec<IdentityCase> {
    let general = vec![Binding::default(), Binding::with_omega1(general_omega1())];
    let thm2_variants: Vec<Binding> = [c(0.0, 0.0), c(2.0, 1.0), c(-1.5, 0.0)]
        .iter()
        .flat_map(|&a| general.iter().map(move |g| Binding { a, ..*g }))
        .collect();
    vec![
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(1, 1),
            tolerance: 1e-8,
            ..base(
                "EQ19",
                "σ(z,τ) = exp(z²δ₂(τ)/2) θ₁(πz|τ)/(πθ₁′(0|τ))",
                sigma_at,
                |b, z| {
                    let d2 = wctx(b)?.delta2();
                    Ok((z * z * d2 / 2.0).exp() * th(T1, PI * z, b)? / (PI * th1p(b.tau, b)?))
                },
            )
        },
        IdentityCase {
            variants: vec![
                Binding::default(),
                Binding::with_omega1(c(1.0, 0.0)),
                Binding::with_omega1(general_omega1()),
            ],
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(1, 1),
            tolerance: 1e-8,
            ..base(
                "EQ20",
                "σ(z|Λ) = 2ω₁ exp(η₁z²/(2ω₁)) θ₁(πz/(2ω₁))/(πθ₁′(0)), η₁ = −π²θ₁‴(0)/(12ω₁θ₁′(0))",
                sigma_at,
                |b, z| {
                    let w1 = b.omega1;
                    let t1p = th1p(b.tau, b)?;
                    let eta1 = -PI * PI * th1ppp(b.tau, b)? / (12.0 * w1 * t1p);
                    Ok(2.0 * w1 * (eta1 * z * z / (2.0 * w1)).exp() * th1_scaled(b, z)? / (PI * t1p))
                },
            )
        },
        IdentityCase {
            variants: general.clone(),
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::TwoOmega1, -0.45, 0.45, SAMPLES).excluding(0.15, |b, z, e| {
                if grid_distance(unit(b, z), b.tau, 1, 1) <= e {
                    return false;
                }
                // keep away from the zeros of ℘″
                let s = (2.0 * b.omega1).norm_sqr();
                wp_at(b, z).is_ok_and(|p| {
                    let g = 30.0 * wctx(b).map_or(zero(), |w| w.delta4()) / (s * s);
                    (6.0 * p * p - g).norm() * s * s > 5.0
                })
            }),
            tolerance: 1e-8,
            ..base(
                "EQ22",
                "d²℘/dz² = 6℘² − 30δ₄",
                |b, z| {
                    let ctx = wctx(b)?;
                    let h = 2e-4 * (2.0 * b.omega1).norm();
                    let f = move |w: C64| wp_prime(w, &ctx);
                    crate::lemma_engine::richardson_diff(&f, z, h)
                },
                |b, z| {
                    let ctx = wctx(b)?;
                    let s = (2.0 * b.omega1).powi(4);
                    let p = wp(z, &ctx)?;
                    Ok(6.0 * p * p - 30.0 * ctx.delta4() / s)
                },
            )
        },
        IdentityCase {
            variants: general.clone(),
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(2, 1),
            tolerance: 1e-8,
            ..base(
                "EQ25",
                "℘(z|Λ) − e₁ = (πθ₃(0)θ₄(0)/(2ω₁))² θ₂²(πz/(2ω₁))/θ₁²(πz/(2ω₁))",
                |b, z| Ok(wp_at(b, z)? - wctx(b)?.e_values().0),
                |b, z| {
                    let k = PI * th(T3, zero(), b)? * th(T4, zero(), b)? / (2.0 * b.omega1);
                    let ratio = th(T2, PI * unit(b, z), b)? / th1_scaled(b, z)?;
                    Ok(k * k * ratio * ratio)
                },
            )
        },
        IdentityCase {
            variants: thm2_variants,
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(1, 1),
            tolerance: 1e-7,
            ..base(
                "THM2",
                "℘(z|Λ) − a = C θ₁(π(z−α₁)/(2ω₁))θ₁(π(z−α₂)/(2ω₁))/θ₁²(πz/(2ω₁)), \
                 C = π²θ₁′²(0)/(4ω₁²θ₁(πα₁/(2ω₁))θ₁(πα₂/(2ω₁)))",
                |b, z| Ok(wp_at(b, z)? - b.a),
                two_zero_form,
            )
        },
        IdentityCase {
            variants: general.clone(),
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(1, 1),
            tolerance: 1e-7,
            ..base(
                "COR1",
                "℘(z|Λ) = π²θ₁′²(0)/(4ω₁²θ₁(πα₁/(2ω₁))θ₁(πα₂/(2ω₁))) · θ₁(π(z−α₁)/(2ω₁))θ₁(π(z−α₂)/(2ω₁))/θ₁²(πz/(2ω₁))",
                wp_at,
                |b, z| two_zero_form(&Binding { a: zero(), ..*b }, z),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Fixed(vec![c(0.0, 8.0)]),
            sample_spec: SampleSpec::points(vec![c(0.2, 0.0), c(0.3, 0.1)]),
            tolerance: 1e-6,
            ..base("REMARK2_LIMIT", "℘(z) = π²/sin²(πz) − π²/3", wp_at, |_, z| {
                let s = (PI * z).sin();
                Ok(PI * PI / (s * s) - PI * PI / 3.0)
            })
        },
        IdentityCase {
            variants: general,
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(2, 2),
            tolerance: 1e-8,
            ..base(
                "EQ29",
                "σ(2z,τ) = −℘_z(z,τ)σ⁴(z,τ)",
                |b, z| sigma_at(b, 2.0 * z),
                |b, z| Ok(-wpp_at(b, z)? * sigma_at(b, z)?.powi(4)),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(2, 1),
            tolerance: 1e-8,
            ..base(
                "EQ30",
                "σ(z+1/2,τ) = σ(1/2,τ)/θ₂(0|τ) · exp(ζ(1/2,τ)z + δ₂(τ)z²/2) θ₂(πz|τ)",
                |b, z| sigma_at(b, z + 0.5),
                |b, z| {
                    let ctx = wctx(b)?;
                    let half = c(0.5, 0.0);
                    let pre = sigma(half, &ctx)? / th(T2, zero(), b)?;
                    let expo = weier_zeta(half, &ctx)? * z + ctx.delta2() * z * z / 2.0;
                    Ok(pre * expo.exp() * th(T2, PI * z, b)?)
                },
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(2, 2),
            tolerance: 1e-8,
            ..base(
                "EQ31",
                "σ(2z,τ) = 2/(πθ₂²(0)θ₃²(0)θ₄²(0)) · exp(2δ₂z²) θ₁(πz)θ₂(πz)θ₃(πz)θ₄(πz)",
                |b, z| sigma_at(b, 2.0 * z),
                |b, z| {
                    let k = theta_consts(b)?;
                    let d2 = wctx(b)?.delta2();
                    let w = PI * z;
                    let prod = th(T1, w, b)? * th(T2, w, b)? * th(T3, w, b)? * th(T4, w, b)?;
                    Ok(2.0 / (PI * k * k) * (2.0 * d2 * z * z).exp() * prod)
                },
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: weier_cell(2, 2),
            tolerance: 1e-8,
            erratum_note: Some(
                "dividing by [θ₂(0)θ₃(0)θ₄(0)]² is a misprint; ℘_z ~ −2/z³ at the origin forces the \
                 factor −2π³[θ₂(0)θ₃(0)θ₄(0)]²"
                    .into(),
            ),
            ..base(
                "EQ33",
                "℘_z(z) = −2π³[θ₂(0)θ₃(0)θ₄(0)]² θ₁^{−3}(πz|τ)θ₂(πz,τ)θ₃(πz,τ)θ₄(πz,τ)",
                wpp_at,
                |b, z| {
                    let k = theta_consts(b)?;
                    let w = PI * z;
                    let t1 = th(T1, w, b)?;
                    Ok(-2.0 * PI.powi(3) * k * k * th(T2, w, b)? * th(T3, w, b)? * th(T4, w, b)? / (t1 * t1 * t1))
                },
            )
        },
    ]
}

/// `∏_{k,j} θ₁(z + kπ/n + jπτ/n)` over the given ranges, skipping `(0,0)` if asked.
fn theta1_grid(
    b: &Binding,
    z: C64,
    n: u32,
    k_range: std::ops::RangeInclusive<i64>,
    j_range: std::ops::RangeInclusive<i64>,
    skip_origin: bool,
) -> Result<C64> {
    let nf = n as f64;
    let mut acc = c(1.0, 0.0);
    for k in k_range {
        for j in j_range.clone() {
            if skip_origin && k == 0 && j == 0 {
                continue;
            }
            acc *= th(T1, z + (k as f64 * PI + j as f64 * PI * b.tau) / nf, b)?;
        }
    }
    Ok(acc)
}

fn theta4_row(b: &Binding, z: C64, l: u32) -> Result<C64> {
    let n = 2.0 * l as f64;
    (-(l as i64 - 1)..=l as i64).try_fold(c(1.0, 0.0), |acc, m| Ok(acc * th(T4, z + m as f64 * PI / n, b)?))
}

/// `∏ ℘_z(z + k/n + jτ/n)` over `0 ≤ k < n`, `0 ≤ j < rows`.
fn wpp_grid(b: &Binding, z: C64, n: u32, rows: u32, skip_origin: bool) -> Result<C64> {
    let ctx = wctx(b)?;
    let nf = n as f64;
    let mut acc = c(1.0, 0.0);
    for k in 0..n {
        for j in 0..rows {
            if skip_origin && k == 0 && j == 0 {
                continue;
            }
            acc *= wp_prime(z + (k as f64 + j as f64 * b.tau) / nf, &ctx)?;
        }
    }
    Ok(acc)
}

fn ntuple_cases() -> Vec<IdentityCase> {
    vec![
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: theta_cell(2, 2),
            ..base(
                "EQ32",
                "θ₁(2z|τ) = 2/(θ₂(0|τ)θ₃(0|τ)θ₄(0|τ))·θ₁(z|τ)θ₂(z|τ)θ₃(z|τ)θ₄(z|τ)",
                |b, z| th(T1, 2.0 * z, b),
                |b, z| {
                    let prod = th(T1, z, b)? * th(T2, z, b)? * th(T3, z, b)? * th(T4, z, b)?;
                    Ok(2.0 / theta_consts(b)? * prod)
                },
            )
        },
        IdentityCase {
            variants: ns(&[2, 3, 4]),
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::Pi, -0.45, 0.45, SAMPLES)
                .excluding(0.02, |b, z, e| grid_distance(z / PI, b.tau, b.n, 1) > e),
            tolerance: 1e-9,
            ..base(
                "EQ34",
                "θ₁(nz|nτ) = nθ₁′(0|nτ)/(θ₁′(0|τ)∏θ₁(kπ/n|τ))·∏θ₁(z+kπ/n|τ)",
                |b, z| {
                    let n = b.n as f64;
                    th(T1, n * z, &with_tau(b, n * b.tau))
                },
                |b, z| {
                    let n = b.n as f64;
                    let big = with_tau(b, n * b.tau);
                    let cst = n * th1p(big.tau, &big)? / (th1p(b.tau, b)? * theta1_grid(b, zero(), b.n, 1..=b.n as i64 - 1, 0..=0, false)?);
                    Ok(cst * theta1_grid(b, z, b.n, 0..=b.n as i64 - 1, 0..=0, false)?)
                },
            )
        },
        IdentityCase {
            variants: ns(&[2, 3, 4]),
            tau_grid: TauGrid::Fixed(vec![c(0.0, 8.0)]),
            sample_spec: trig_box(),
            tolerance: 1e-6,
            ..base(
                "EQ34_LIMIT",
                "lim_{τ→i∞} e^{−iπτ/4}θ₁(z|τ) = 2sin(z)",
                |b, z| {
                    let scale = (-I * PI * b.tau / 4.0).exp() / 2.0;
                    let nf = b.n as f64;
                    (0..b.n).try_fold(c(1.0, 0.0), |acc, k| Ok(acc * scale * th(T1, z + k as f64 * PI / nf, b)?))
                },
                |b, z| Ok(2f64.powi(1 - b.n as i32) * (b.n as f64 * z).sin()),
            )
        },
        IdentityCase {
            variants: ls(&[1, 2]),
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::Pi, -0.45, 0.45, SAMPLES)
                .excluding(0.02, |b, z, e| grid_distance(z / PI, b.tau, 2 * b.l + 1, 2 * b.l + 1) > e),
            tolerance: 1e-8,
            ..base(
                "THM3_ODD",
                "θ₁((2l+1)z|τ) = C ∏_{k=−l}^{l}∏_{j=−l}^{l} θ₁(z + kπ/(2l+1) + jπτ/(2l+1)|τ), \
                 C^{−1} = 1/(2l+1) ∏′ θ₁(kπ/(2l+1) + jπτ/(2l+1)|τ)",
                |b, z| th(T1, (2 * b.l + 1) as f64 * z, b),
                |b, z| {
                    let n = 2 * b.l + 1;
                    let l = b.l as i64;
                    let cinv = theta1_grid(b, zero(), n, -l..=l, -l..=l, true)? / n as f64;
                    Ok(theta1_grid(b, z, n, -l..=l, -l..=l, false)? / cinv)
                },
            )
        },
        IdentityCase {
            variants: ls(&[1, 2]),
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::Pi, -0.45, 0.45, SAMPLES)
                .excluding(0.02, |b, z, e| grid_distance(z / PI, b.tau, 2 * b.l, 2 * b.l) > e),
            tolerance: 1e-8,
            ..base(
                "THM3_EVEN",
                "θ₁(2lz,τ) = C̃ ∏_{m=−(l−1)}^{l} θ₄(z + mπ/2l) × ∏_{k=−(l−1)}^{l}∏_{j=−(l−1)}^{l−1} θ₁(z + kπ/2l + jπτ/2l|τ)",
                |b, z| th(T1, (2 * b.l) as f64 * z, b),
                |b, z| {
                    let n = 2 * b.l;
                    let l = b.l as i64;
                    let cinv = theta4_row(b, zero(), b.l)? * theta1_grid(b, zero(), n, 1 - l..=l, 1 - l..=l - 1, true)?
                        / n as f64;
                    Ok(theta4_row(b, z, b.l)? * theta1_grid(b, z, n, 1 - l..=l, 1 - l..=l - 1, false)? / cinv)
                },
            )
        },
        IdentityCase {
            variants: ls(&[1, 2]),
            tau_grid: TauGrid::Sweep,
            tolerance: 1e-7,
            ..base(
                "THM3_EVEN_C1",
                "θ₁(2lz|τ) = C exp(C₁z) ∏_{k=−(l−1)}^{l}∏_{j=−(l−1)}^{l} θ₁(z + kπ/n + jπτ/n|τ), C₁ = 2il",
                |b, _| {
                    let bb = *b;
                    let n = 2 * b.l;
                    let l = b.l as i64;
                    let f = FunctionHandle::new("θ₁(2lz)", move |z: C64| th(T1, n as f64 * z, &bb));
                    let g = FunctionHandle::new("unsymmetrized product", move |z: C64| {
                        theta1_grid(&bb, z, n, 1 - l..=l, 1 - l..=l, false)
                    });
                    let region = Region::new(c(0.21, 0.07), c(0.57, 0.29))?;
                    Ok(fit_log_polynomial(&f, &g, &region, 1, 64)?.coefficients[1])
                },
                |b, _| Ok(2.0 * I * b.l as f64),
            )
        },
        IdentityCase {
            variants: ns(&[2, 3]),
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::Unit, -0.45, 0.45, SAMPLES)
                .excluding(0.02, |b, z, e| grid_distance(z, b.tau, 2 * b.n, 2) > e),
            tolerance: 1e-8,
            erratum_note: Some(
                "℘_z(kπ/n, τ) in the constant is read as ℘_z(k/n, τ) to match the shifts of the product. \
                 For even n the constant contains ℘_z(1/2, τ) = 0 and the identity does not hold"
                    .into(),
            ),
            ..base(
                "EQ41",
                "℘_z(nz, nτ) = 1/(n³∏_{k=1}^{n−1}℘_z(k/n, τ)) ∏_{k=0}^{n−1}℘_z(z + k/n, τ)",
                |b, z| {
                    let n = b.n as f64;
                    wpp_at(&with_tau(b, n * b.tau), n * z)
                },
                |b, z| {
                    let n = b.n as f64;
                    let cinv = n.powi(3) * wpp_grid(b, zero(), b.n, 1, true)?;
                    Ok(wpp_grid(b, z, b.n, 1, false)? / cinv)
                },
            )
        },
        IdentityCase {
            variants: ns(&[2, 3]),
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::Unit, -0.45, 0.45, SAMPLES)
                .excluding(0.02, |b, z, e| grid_distance(z, b.tau, 2 * b.n, 2 * b.n) > e),
            tolerance: 1e-8,
            erratum_note: Some(
                "for even n the constant contains ℘_z at half periods, where it vanishes, and the identity \
                 does not hold"
                    .into(),
            ),
            ..base(
                "EQ42_43",
                "℘_z(nz|τ) = C ∏_{k=0}^{n−1}∏_{j=0}^{n−1} ℘_z(z + k/n + jτ/n, τ), C^{−1} = n³∏′℘_z(k/n + jτ/n, τ)",
                |b, z| wpp_at(b, b.n as f64 * z),
                |b, z| {
                    let n = b.n as f64;
                    let cinv = n.powi(3) * wpp_grid(b, zero(), b.n, b.n, true)?;
                    Ok(wpp_grid(b, z, b.n, b.n, false)? / cinv)
                },
            )
        },
    ]
}

fn modular_cases() -> Vec<IdentityCase> {
    vec![
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: theta_cell(1, 1),
            erratum_note: Some("i^{1/2} is the principal value e^{iπ/4}".into()),
            ..base(
                "EQ45",
                "θ₁(z|1+τ) = i^{1/2}θ₁(z|τ)",
                |b, z| th(T1, z, &with_tau(b, b.tau + 1.0)),
                |b, z| Ok((I * PI / 4.0).exp() * th(T1, z, b)?),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::boxed(c(-1.2, -0.5), c(1.2, 0.5), SAMPLES)
                .excluding(0.03, |b, z, e| grid_distance(z / PI, -1.0 / b.tau, 1, 1) > e),
            tolerance: 1e-9,
            ..base(
                "EQ46",
                "θ₁(z|−1/τ) = −i(−iτ)^{1/2}exp(iτz²/π)θ₁(τz|τ)",
                |b, z| th(T1, z, &with_tau(b, -1.0 / b.tau)),
                |b, z| Ok(-I * (-I * b.tau).sqrt() * (I * b.tau * z * z / PI).exp() * th(T1, b.tau * z, b)?),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::Unit, -0.45, 0.45, SAMPLES)
                .excluding(0.03, |b, z, e| grid_distance(z, b.tau, 1, 1) > e),
            ..base(
                "EQ47",
                "θ₁(πz|τ) = ie^{πi(τ/4−z)}(x;q)(q/x;q)(q;q)",
                |b, z| th(T1, PI * z, b),
                |b, z| triple_product_theta1(z, b.tau, &b.policy),
            )
        },
        IdentityCase {
            tau_grid: TauGrid::Sweep,
            sample_spec: SampleSpec::cell(CellScale::Unit, -0.45, 0.45, SAMPLES)
                .excluding(0.03, |b, z, e| grid_distance(z - 0.5 - b.tau / 2.0, b.tau, 1, 1) > e),
            ..base(
                "EQ48",
                "θ₃(πz,q) = ∏(1−qⁿ)(1+q^{n−1/2}x)(1+q^{n−1/2}/x)",
                |b, z| th(T3, PI * z, b),
                |b, z| triple_product_theta3(z, b.tau, &b.policy),
            )
        },
    ]
}
