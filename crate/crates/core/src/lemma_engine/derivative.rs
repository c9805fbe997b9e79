use super::handle::FunctionHandle;
use crate::error::{Error, Result};
use crate::C64;

const RICHARDSON_TOL: f64 = 1e-5;

/// `dⁿ/dzⁿ ln f(z)` for `1 ≤ n ≤ 4`.
///
/// `L = f′/f` is evaluated on a central stencil of step `h` (and `h/2`),
/// differentiated `n − 1` times and Richardson-extrapolated. The inner `f′`
/// is analytic when the handle has one, otherwise a Richardson-refined
/// central difference with the same step `h`. Without an analytic `f′`,
/// roundoff limits orders 3 and 4 to roughly `1e−16/h^{n}` accuracy.
pub fn log_derivative(f: &FunctionHandle, z: C64, n: u32, h: f64) -> Result<C64> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidParameter(format!("order must be in 1..=4, got {n}")));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let l = |w: C64| -> Result<C64> {
        let v = f.eval(w)?;
        let d = f.derivative(w, h)?;
        let r = d / v;
        if !r.is_finite() {
            return Err(Error::Pole {
                at: w,
                what: format!("log-derivative of '{}'", f.label()),
            });
        }
        Ok(r)
    };
    let centre = l(z)?;
    if n == 1 {
        return Ok(centre);
    }
    let stencil = |h: f64| -> Result<C64> {
        Ok(match n {
            2 => (l(z + h)? - l(z - h)?) / (2.0 * h),
            3 => (l(z + h)? - 2.0 * centre + l(z - h)?) / (h * h),
            _ => {
                (l(z + 2.0 * h)? - 2.0 * l(z + h)? + 2.0 * l(z - h)? - l(z - 2.0 * h)?)
                    / (2.0 * h * h * h)
            }
        })
    };
    let coarse = stencil(h)?;
    let fine = stencil(0.5 * h)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let scale = extrapolated.norm().max(centre.norm()).max(1e-300);
    let disagreement = (extrapolated - fine).norm() / scale;
    if disagreement > RICHARDSON_TOL {
        return Err(Error::Instability(format!(
            "order-{n} log-derivative of '{}' at {z}: Richardson disagreement {disagreement:e}",
            f.label()
        )));
    }
    Ok(extrapolated)
}
