//! Argument-principle search for zeros and poles on a rectangular grid.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::handle::FunctionHandle;
use super::quadrature::integrate_segment;
use crate::error::{Error, Result};
use crate::{C64, I};

/// Grid offsets in units of the cell size; the first is the default, the
/// rest are used when a grid line runs too close to a zero or pole.
const JITTERS: [(f64, f64); 4] = [
    (0.0137, 0.0082),
    (0.1931, 0.2417),
    (0.3719, 0.1303),
    (0.2683, 0.4159),
];

/// Fraction at which cells are split on subdivision.
const SPLIT: f64 = 0.5137;

const INTEGER_SLACK: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    lower_left: C64,
    upper_right: C64,
}

impl Region {
    pub fn new(lower_left: C64, upper_right: C64) -> Result<Self> {
        if !(lower_left.re < upper_right.re && lower_left.im < upper_right.im)
            || !lower_left.is_finite()
            || !upper_right.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "degenerate region {lower_left} .. {upper_right}"
            )));
        }
        Ok(Self {
            lower_left,
            upper_right,
        })
    }

    pub fn lower_left(&self) -> C64 {
        self.lower_left
    }
    pub fn upper_right(&self) -> C64 {
        self.upper_right
    }
    pub fn width(&self) -> f64 {
        self.upper_right.re - self.lower_left.re
    }
    pub fn height(&self) -> f64 {
        self.upper_right.im - self.lower_left.im
    }
    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }
    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.lower_left.re
            && z.re <= self.upper_right.re
            && z.im >= self.lower_left.im
            && z.im <= self.upper_right.im
    }

    /// Corners counterclockwise from the lower left.
    pub fn corners(&self) -> [C64; 4] {
        let (a, b) = (self.lower_left, self.upper_right);
        [a, C64::new(b.re, a.im), b, C64::new(a.re, b.im)]
    }

    fn split(&self) -> [Region; 4] {
        let (a, b) = (self.lower_left, self.upper_right);
        let m = C64::new(
            a.re + SPLIT * self.width(),
            a.im + SPLIT * self.height(),
        );
        [
            Region { lower_left: a, upper_right: m },
            Region { lower_left: C64::new(m.re, a.im), upper_right: C64::new(b.re, m.im) },
            Region { lower_left: m, upper_right: b },
            Region { lower_left: C64::new(a.re, m.im), upper_right: C64::new(m.re, b.im) },
        ]
    }
}

/// A zero (`order > 0`) or pole (`order < 0`) of the given multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPoleRecord {
    pub location: C64,
    pub order: i32,
}

impl ZeroPoleRecord {
    pub fn new(location: C64, order: i32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("order must be nonzero".into()));
        }
        Ok(Self { location, order })
    }
}

/// `(1/2πi) ∮ ((z−c)/d)^k f′/f dz` for `k = 0, 1, 2`, with `c` the cell
/// centre and `d` its diameter, so every moment is of order one.
fn moments(f: &FunctionHandle, region: &Region, h: f64) -> Result<[C64; 3]> {
    let centre = 0.5 * (region.lower_left + region.upper_right);
    let d = region.diameter();
    let integrand = |z: C64| -> Result<[C64; 3]> {
        let v = f.eval(z)?;
        let l = f.derivative(z, h)? / v;
        if !l.is_finite() {
            return Err(Error::BoundarySingularity(format!(
                "f′/f of '{}' is singular at {z}",
                f.label()
            )));
        }
        let t = (z - centre) / d;
        Ok([l, t * l, t * t * l])
    };
    let c = region.corners();
    let mut total = [C64::new(0.0, 0.0); 3];
    for k in 0..4 {
        let part = integrate_segment(&integrand, c[k], c[(k + 1) % 4], 1e-9)?;
        for i in 0..3 {
            total[i] += part[i];
        }
    }
    let norm = 1.0 / (2.0 * PI * I);
    Ok(total.map(|t| t * norm))
}

/// The unrounded winding number `(1/2πi) ∮ f′/f dz` around `region`.
pub fn winding_number(f: &FunctionHandle, region: &Region) -> Result<C64> {
    let h = 1e-5 * region.width().min(region.height());
    Ok(moments(f, region, h)?[0])
}

fn round_winding(w: C64) -> Result<i32> {
    let r = w.re.round();
    if (w - C64::new(r, 0.0)).norm() >= INTEGER_SLACK {
        return Err(Error::NonIntegerWinding { value: w.re });
    }
    Ok(r as i32)
}

/// Finds every zero and pole of `f` inside `region`.
///
/// The region is cut into cells of side at most `cell_size`; each cell's
/// winding number decides whether it holds anything. A cell whose first two
/// moments show a single point is resolved by its centroid
/// `∮ z f′/f / ∮ f′/f`; otherwise it is split, down to diameter `tol`.
pub fn locate_zeros_poles(
    f: &FunctionHandle,
    region: &Region,
    cell_size: f64,
    tol: f64,
) -> Result<Vec<ZeroPoleRecord>> {
    if !(cell_size > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cell_size and tol must be positive, got {cell_size}, {tol}"
        )));
    }
    let mut last_err = None;
    for jitter in JITTERS {
        match locate_with_jitter(f, region, cell_size, tol, jitter) {
            Ok(mut records) => {
                records.sort_by(|a, b| {
                    (a.location.re, a.location.im)
                        .partial_cmp(&(b.location.re, b.location.im))
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                return Ok(records);
            }
            Err(e @ (Error::BoundarySingularity(_) | Error::NonIntegerWinding { .. })) => {
                last_err = Some(e)
            }
            Err(Error::Domain(_)) => {
                last_err = Some(Error::BoundarySingularity(format!(
                    "'{}' could not be evaluated on the grid",
                    f.label()
                )))
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::BoundarySingularity("no grid attempt".into())))
}

fn grid_lines(lo: f64, hi: f64, cell: f64, offset: f64) -> Vec<f64> {
    let count = ((hi - lo) / cell).ceil().max(1.0) as usize;
    let step = (hi - lo) / count as f64;
    let mut lines = vec![lo];
    for k in 0..count {
        let x = lo + offset * step + k as f64 * step;
        if x > lo + 1e-3 * step && x < hi - 1e-3 * step {
            lines.push(x);
        }
    }
    lines.push(hi);
    lines
}

fn locate_with_jitter(
    f: &FunctionHandle,
    region: &Region,
    cell_size: f64,
    tol: f64,
    jitter: (f64, f64),
) -> Result<Vec<ZeroPoleRecord>> {
    let a = region.lower_left;
    let b = region.upper_right;
    let xs = grid_lines(a.re, b.re, cell_size, jitter.0);
    let ys = grid_lines(a.im, b.im, cell_size, jitter.1);
    let mut cells = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            cells.push(Region {
                lower_left: C64::new(xs[i], ys[j]),
                upper_right: C64::new(xs[i + 1], ys[j + 1]),
            });
        }
    }
    let h = 1e-5 * cell_size;
    let found: Vec<Vec<ZeroPoleRecord>> = cells
        .par_iter()
        .map(|cell| resolve_cell(f, cell, h, tol))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

fn resolve_cell(f: &FunctionHandle, cell: &Region, h: f64, tol: f64) -> Result<Vec<ZeroPoleRecord>> {
    let h = h.min(1e-3 * cell.width().min(cell.height()));
    let [m0, m1, m2] = moments(f, cell, h)?;
    let w = round_winding(m0)?;
    let diam = cell.diameter();
    if w == 0 {
        // a zero and a pole of equal order cancel in m0 but not in m1
        if m1.norm() <= 1e-6 || diam < tol {
            return Ok(Vec::new());
        }
    } else {
        let wf = w as f64;
        let t = m1 / wf;
        let spread = (m2 / wf - t * t).norm();
        let location = 0.5 * (cell.lower_left + cell.upper_right) + diam * t;
        if (spread <= 1e-6 && cell.contains(location)) || diam < tol {
            return Ok(vec![ZeroPoleRecord { location, order: w }]);
        }
    }
    split_cell(f, cell, h, tol)
}

fn split_cell(f: &FunctionHandle, cell: &Region, h: f64, tol: f64) -> Result<Vec<ZeroPoleRecord>> {
    let mut out = Vec::new();
    for child in cell.split() {
        out.extend(resolve_cell(f, &child, h, tol)?);
    }
    Ok(out)
}
