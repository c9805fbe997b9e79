use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::C64;

pub type ComplexFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

/// A complex function with an optional analytic derivative.
#[derive(Clone)]
pub struct FunctionHandle {
    evaluate: ComplexFn,
    derivative: Option<ComplexFn>,
    label: String,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("label", &self.label)
            .field("derivative", &self.derivative.is_some())
            .finish()
    }
}

impl FunctionHandle {
    pub fn new<F>(label: impl Into<String>, evaluate: F) -> Self
    where
        F: Fn(C64) -> Result<C64> + Send + Sync + 'static,
    {
        Self {
            evaluate: Arc::new(evaluate),
            derivative: None,
            label: label.into(),
        }
    }

    /// Attaches `f′`, checked against a central difference of `f` at each
    /// probe point (relative agreement 1e−6).
    pub fn with_derivative<F>(mut self, derivative: F, probes: &[C64]) -> Result<Self>
    where
        F: Fn(C64) -> Result<C64> + Send + Sync + 'static,
    {
        let derivative: ComplexFn = Arc::new(derivative);
        for &z in probes {
            let h = 1e-4 * z.norm().max(1.0);
            let numeric = richardson_diff(&*self.evaluate, z, h)?;
            let analytic = derivative(z)?;
            let err = (numeric - analytic).norm() / analytic.norm().max(numeric.norm()).max(1e-300);
            if err > 1e-6 {
                return Err(Error::InvalidParameter(format!(
                    "derivative of '{}' disagrees with finite differences at {z}: \
                     {analytic} vs {numeric}",
                    self.label
                )));
            }
        }
        self.derivative = Some(derivative);
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let v = (self.evaluate)(z)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("'{}' is not finite at {z}", self.label)));
        }
        Ok(v)
    }

    /// `f′(z)`: analytic when attached, otherwise a Richardson-refined
    /// central difference with step `h`.
    pub fn derivative(&self, z: C64, h: f64) -> Result<C64> {
        match &self.derivative {
            Some(d) => d(z),
            None => richardson_diff(&*self.evaluate, z, h),
        }
    }
}

/// `(4 D(h/2) − D(h)) / 3` with `D` the central difference.
pub(crate) fn richardson_diff(f: &(dyn Fn(C64) -> Result<C64> + Send + Sync), z: C64, h: f64) -> Result<C64> {
    let d = |h: f64| -> Result<C64> { Ok((f(z + h)? - f(z - h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
