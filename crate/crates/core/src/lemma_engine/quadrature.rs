//! Adaptive Gauss–Kronrod (7/15) and fixed Gauss–Legendre rules on
//! straight segments of the complex plane.

use crate::error::{Error, Result};
use crate::C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

/// `∫_a^b g(z) dz` for a vector of integrands, adaptively bisected until the
/// Kronrod–Gauss difference of every component is below `tol` (absolute,
/// halved per bisection down to a floor of `tol·1e−4`).
pub(crate) fn integrate_segment<const N: usize, G>(g: &G, a: C64, b: C64, tol: f64) -> Result<[C64; N]>
where
    G: Fn(C64) -> Result<[C64; N]>,
{
    panel(g, a, b, tol, 1e-4 * tol, 0)
}

fn panel<const N: usize, G>(g: &G, a: C64, b: C64, tol: f64, floor: f64, depth: u32) -> Result<[C64; N]>
where
    G: Fn(C64) -> Result<[C64; N]>,
{
    let (kronrod, gauss) = gk15(g, a, b)?;
    let err = (0..N)
        .map(|i| (kronrod[i] - gauss[i]).norm())
        .fold(0.0, |acc: f64, e| if e.is_finite() { acc.max(e) } else { f64::INFINITY });
    if err <= tol.max(floor) {
        return Ok(kronrod);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::BoundarySingularity(format!(
            "quadrature on [{a}, {b}] did not settle (error estimate {err:e})"
        )));
    }
    let mid = 0.5 * (a + b);
    let left = panel(g, a, mid, 0.5 * tol, floor, depth + 1)?;
    let right = panel(g, mid, b, 0.5 * tol, floor, depth + 1)?;
    let mut out = [C64::new(0.0, 0.0); N];
    for i in 0..N {
        out[i] = left[i] + right[i];
    }
    Ok(out)
}

fn gk15<const N: usize, G>(g: &G, a: C64, b: C64) -> Result<([C64; N], [C64; N])>
where
    G: Fn(C64) -> Result<[C64; N]>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = [C64::new(0.0, 0.0); N];
    let mut gs = [C64::new(0.0, 0.0); N];
    let fc = g(centre)?;
    for i in 0..N {
        k[i] += WGK[7] * fc[i];
        gs[i] += WG[3] * fc[i];
    }
    for j in 0..7 {
        let dz = half * XGK[j];
        let f1 = g(centre - dz)?;
        let f2 = g(centre + dz)?;
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                gs[i] += WG[j / 2] * s;
            }
        }
    }
    for i in 0..N {
        k[i] *= half;
        gs[i] *= half;
    }
    Ok((k, gs))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, t);
            let step = p / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_exp() {
        let a = C64::new(0.0, 0.0);
        let b = C64::new(1.0, 2.0);
        let r = integrate_segment(&|z: C64| Ok([z.exp()]), a, b, 1e-13).unwrap();
        assert!((r[0] - (b.exp() - a.exp())).norm() < 1e-12);
    }

    #[test]
    fn gl_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_segment_reports_error() {
        let r = integrate_segment(
            &|z: C64| Ok([1.0 / (z - 0.5).norm().sqrt() * C64::new(1.0, 0.0) / (z - 0.5)]),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            1e-12,
        );
        assert!(r.is_err(), "{r:?}");
    }
}
