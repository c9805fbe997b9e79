use std::f64::consts::PI;

use super::handle::FunctionHandle;
use super::locate::Region;
use crate::error::{Error, Result};
use crate::C64;

const MAX_SAMPLES: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct LogPolyFit {
    /// `c₀, c₁, …` with `f/g ≈ exp(Σ cⱼ zʲ)`; `Im c₀ ∈ (−π, π]`.
    pub coefficients: Vec<C64>,
    /// Largest deviation of the fitted polynomial from the sampled log-ratio.
    pub residual: f64,
}

/// Least-squares fit of `ln(f/g)` by a polynomial of degree ≤ 2 along the
/// boundary of `region`.
///
/// The logarithm is tracked continuously along the boundary, walked
/// counterclockwise from the lower-left corner. If two neighbouring samples
/// differ in phase by π/2 or more the sample count is doubled, up to 2¹⁴.
pub fn fit_log_polynomial(
    f: &FunctionHandle,
    g: &FunctionHandle,
    region: &Region,
    degree: usize,
    samples: usize,
) -> Result<LogPolyFit> {
    if degree > 2 {
        return Err(Error::InvalidParameter(format!("degree must be <= 2, got {degree}")));
    }
    if samples < 2 * (degree + 1) {
        return Err(Error::InvalidParameter(format!(
            "need at least {} samples, got {samples}",
            2 * (degree + 1)
        )));
    }
    let mut n = samples;
    loop {
        let points = boundary_points(region, n);
        match tracked_log_ratio(f, g, &points)? {
            Some(values) => return least_squares(&points, &values, degree, region),
            None if n * 2 <= MAX_SAMPLES => n *= 2,
            None => {
                return Err(Error::BranchTracking(format!(
                    "phase of {}/{} jumps by >= π/2 even with {n} samples",
                    f.label(),
                    g.label()
                )))
            }
        }
    }
}

fn boundary_points(region: &Region, n: usize) -> Vec<C64> {
    let corners = region.corners();
    let perimeter = 2.0 * (region.width() + region.height());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = perimeter * k as f64 / n as f64;
        let mut edge = 0;
        loop {
            let len = (corners[(edge + 1) % 4] - corners[edge]).norm();
            if s <= len || edge == 3 {
                let dir = (corners[(edge + 1) % 4] - corners[edge]) / len;
                out.push(corners[edge] + dir * s);
                break;
            }
            s -= len;
            edge += 1;
        }
    }
    out
}

/// `None` when some step's phase change reaches π/2.
fn tracked_log_ratio(f: &FunctionHandle, g: &FunctionHandle, points: &[C64]) -> Result<Option<Vec<C64>>> {
    let mut out = Vec::with_capacity(points.len());
    let mut prev: Option<C64> = None;
    for &z in points {
        let r = f.eval(z)? / g.eval(z)?;
        if !r.is_finite() || r.norm() == 0.0 {
            return Err(Error::Domain(format!(
                "{}/{} is zero or singular at {z}",
                f.label(),
                g.label()
            )));
        }
        let value = match (prev, out.last()) {
            (Some(p), Some(&last)) => {
                let step = (r / p).ln();
                if step.im.abs() >= 0.5 * PI {
                    return Ok(None);
                }
                last + step
            }
            _ => r.ln(),
        };
        out.push(value);
        prev = Some(r);
    }
    Ok(Some(out))
}

fn least_squares(points: &[C64], values: &[C64], degree: usize, region: &Region) -> Result<LogPolyFit> {
    let centre = 0.5 * (region.lower_left() + region.upper_right());
    let scale = 0.5 * region.diameter();
    let cols = degree + 1;
    let m = points.len();
    // columns t^j with t = (z − centre)/scale, orthonormalized in place
    let mut q: Vec<Vec<C64>> = (0..cols)
        .map(|j| points.iter().map(|z| ((z - centre) / scale).powi(j as i32)).collect())
        .collect();
    let mut r = vec![vec![C64::new(0.0, 0.0); cols]; cols];
    for j in 0..cols {
        for i in 0..j {
            let proj: C64 = (0..m).map(|k| q[i][k].conj() * q[j][k]).sum();
            r[i][j] = proj;
            let (head, tail) = q.split_at_mut(j);
            for (t, v) in tail[0].iter_mut().zip(&head[i]) {
                *t -= proj * v;
            }
        }
        let norm = q[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 * (m as f64).sqrt() {
            return Err(Error::RankDeficient(format!(
                "sample path does not determine a degree-{degree} polynomial"
            )));
        }
        r[j][j] = C64::new(norm, 0.0);
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<C64> = (0..cols)
        .map(|i| (0..m).map(|k| q[i][k].conj() * values[k]).sum())
        .collect();
    let mut b = vec![C64::new(0.0, 0.0); cols];
    for i in (0..cols).rev() {
        let mut s = qty[i];
        for j in i + 1..cols {
            s -= r[i][j] * b[j];
        }
        b[i] = s / r[i][i];
    }
    let residual = points
        .iter()
        .zip(values)
        .map(|(z, v)| {
            let t = (z - centre) / scale;
            let p = b.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * t + c);
            (p - v).norm()
        })
        .fold(0.0, f64::max);
    // Σ bⱼ ((z − c)/s)^j expanded in powers of z
    let mut coefficients = vec![C64::new(0.0, 0.0); cols];
    for (j, bj) in b.iter().enumerate() {
        let lead = bj / scale.powi(j as i32);
        let mut binom = 1.0;
        for (p, coef) in coefficients.iter_mut().enumerate().take(j + 1) {
            // C(j,p) z^p (−c)^{j−p}
            *coef += lead * binom * (-centre).powi((j - p) as i32);
            binom = binom * (j - p) as f64 / (p + 1) as f64;
        }
    }
    let turns = (coefficients[0].im / (2.0 * PI)).round();
    coefficients[0].im -= 2.0 * PI * turns;
    if coefficients[0].im <= -PI {
        coefficients[0].im += 2.0 * PI;
    }
    Ok(LogPolyFit {
        coefficients,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exact_quadratic() {
        let f = FunctionHandle::new("exp(3z^2+2z+1)", |z: C64| Ok((3.0 * z * z + 2.0 * z + 1.0).exp()));
        let g = FunctionHandle::new("1", |_| Ok(c(1.0, 0.0)));
        let r = Region::new(c(-0.5, -0.4), c(0.6, 0.5)).unwrap();
        let fit = fit_log_polynomial(&f, &g, &r, 2, 64).unwrap();
        for (got, want) in fit.coefficients.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).norm() < 1e-10, "{got}");
        }
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn fast_phase_forces_refinement() {
        // 8 samples leave phase steps of 3 rad; the fit must refine
        let f = FunctionHandle::new("exp(3iz)", |z: C64| Ok((c(0.0, 3.0) * z).exp()));
        let g = FunctionHandle::new("1", |_| Ok(c(1.0, 0.0)));
        let r = Region::new(c(-1.0, -1.0), c(1.0, 1.0)).unwrap();
        let fit = fit_log_polynomial(&f, &g, &r, 1, 8).unwrap();
        assert!((fit.coefficients[1] - c(0.0, 3.0)).norm() < 1e-9);
        assert!(fit.coefficients[0].norm() < 1e-9);
    }

    #[test]
    fn rejections() {
        let f = FunctionHandle::new("1", |_| Ok(c(1.0, 0.0)));
        let r = Region::new(c(-1.0, -1.0), c(1.0, 1.0)).unwrap();
        assert!(fit_log_polynomial(&f, &f, &r, 3, 64).is_err());
        assert!(fit_log_polynomial(&f, &f, &r, 2, 4).is_err());
        let z = FunctionHandle::new("z", |z: C64| Ok(z));
        // log z winds once around the boundary: never a polynomial
        let fit = fit_log_polynomial(&z, &f, &r, 2, 64).unwrap();
        assert!(fit.residual > 1.0);
    }
}
