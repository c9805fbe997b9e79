//! Executable identity catalog and its runner.
//!
//! Every case compares a left-hand and a right-hand evaluator over a grid of
//! parameter bindings and a deterministic set of sample points, with the
//! relative difference `|L−R| / max(|L|, |R|, 1e−300)`.

mod catalog;
mod sampling;

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use catalog::build_catalog;
pub use sampling::{grid_distance, real_grid_distance, CellScale, KeepFn, SampleDomain, SampleSpec};

use crate::eisenstein::TruncationPolicy;
use crate::error::{Error, Result};
use crate::{rel_err_floor, C64};

/// `{i, 1.2i, 2i, 0.3+1.1i, −0.4+0.9i}`.
pub const DEFAULT_TAU_SET: [C64; 5] = [
    C64::new(0.0, 1.0),
    C64::new(0.0, 1.2),
    C64::new(0.0, 2.0),
    C64::new(0.3, 1.1),
    C64::new(-0.4, 0.9),
];

/// Bounds on a case tolerance.
pub const MIN_TOLERANCE: f64 = 1e-12;
pub const MAX_TOLERANCE: f64 = 1e-6;

/// Default floor of the relative-error denominator.
pub const REL_FLOOR: f64 = 1e-300;

/// One point of a case's parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binding {
    pub tau: C64,
    pub omega1: C64,
    pub n: u32,
    pub l: u32,
    pub a: C64,
    /// `(m, n)` in a period shift `mπ + nπτ`
    pub shift: (i64, i64),
    pub policy: TruncationPolicy,
}

impl Default for Binding {
    fn default() -> Self {
        Self {
            tau: C64::new(0.0, 1.0),
            omega1: C64::new(0.5, 0.0),
            n: 0,
            l: 0,
            a: C64::new(0.0, 0.0),
            shift: (0, 0),
            policy: TruncationPolicy::default(),
        }
    }
}

impl Binding {
    pub fn with_n(n: u32) -> Self {
        Self { n, ..Self::default() }
    }

    pub fn with_l(l: u32) -> Self {
        Self { l, ..Self::default() }
    }

    pub fn with_a(a: C64) -> Self {
        Self { a, ..Self::default() }
    }

    pub fn with_omega1(omega1: C64) -> Self {
        Self { omega1, ..Self::default() }
    }

    pub fn with_shift(m: i64, n: i64) -> Self {
        Self { shift: (m, n), ..Self::default() }
    }

    /// Short human-readable label listing the fields that differ from the default.
    pub fn label(&self, uses_tau: bool) -> String {
        let d = Self::default();
        let mut parts = Vec::new();
        if uses_tau {
            parts.push(format!("tau={}", fmt_c(self.tau)));
        }
        if self.omega1 != d.omega1 {
            parts.push(format!("omega1={}", fmt_c(self.omega1)));
        }
        if self.n != 0 {
            parts.push(format!("n={}", self.n));
        }
        if self.l != 0 {
            parts.push(format!("l={}", self.l));
        }
        if self.a != d.a {
            parts.push(format!("a={}", fmt_c(self.a)));
        }
        if self.shift != (0, 0) {
            parts.push(format!("shift=({},{})", self.shift.0, self.shift.1));
        }
        parts.join(" ")
    }
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Evaluator of one side of an identity.
pub type Evaluator = Arc<dyn Fn(&Binding, C64) -> Result<C64> + Send + Sync>;

/// Which modular parameters a case is evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub enum TauGrid {
    /// The identity does not involve `τ`.
    Unused,
    /// Every `τ` of the run configuration.
    Sweep,
    /// These values only, whatever the configuration.
    Fixed(Vec<C64>),
}

#[derive(Clone)]
pub struct IdentityCase {
    pub id: String,
    pub citation: String,
    pub lhs: Evaluator,
    pub rhs: Evaluator,
    /// Non-`τ` parameter variants; crossed with the `τ` grid.
    pub variants: Vec<Binding>,
    pub tau_grid: TauGrid,
    pub sample_spec: SampleSpec,
    pub tolerance: f64,
    /// Absolute floor in the relative-error denominator.
    pub floor: f64,
    pub erratum_note: Option<String>,
}

impl fmt::Debug for IdentityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityCase")
            .field("id", &self.id)
            .field("citation", &self.citation)
            .field("variants", &self.variants.len())
            .field("tau_grid", &self.tau_grid)
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

impl IdentityCase {
    /// Full parameter grid for a run over `tau_set` with `policy`.
    pub fn param_grid(&self, tau_set: &[C64], policy: &TruncationPolicy) -> Vec<Binding> {
        let taus: Vec<Option<C64>> = match &self.tau_grid {
            TauGrid::Unused => vec![None],
            TauGrid::Sweep => tau_set.iter().copied().map(Some).collect(),
            TauGrid::Fixed(t) => t.iter().copied().map(Some).collect(),
        };
        let mut out = Vec::new();
        for v in &self.variants {
            for t in &taus {
                let mut b = *v;
                if let Some(t) = t {
                    b.tau = *t;
                }
                b.policy = *policy;
                out.push(b);
            }
        }
        out
    }

    /// Checks the structural invariants of a case.
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.citation.is_empty() {
            return Err(Error::InvalidParameter("case id and citation must be non-empty".into()));
        }
        if self.variants.is_empty() || matches!(&self.tau_grid, TauGrid::Fixed(t) if t.is_empty()) {
            return Err(Error::InvalidParameter(format!("{}: empty parameter grid", self.id)));
        }
        if !(self.floor >= REL_FLOOR) {
            return Err(Error::InvalidParameter(format!("{}: floor must be >= {REL_FLOOR}", self.id)));
        }
        if !(MIN_TOLERANCE..=MAX_TOLERANCE).contains(&self.tolerance) {
            return Err(Error::InvalidParameter(format!(
                "{}: tolerance {} outside [{MIN_TOLERANCE}, {MAX_TOLERANCE}]",
                self.id, self.tolerance
            )));
        }
        Ok(())
    }
}

/// Per-run overrides for [`run_case`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOverrides {
    pub tolerance: Option<f64>,
    pub tau_set: Option<Vec<C64>>,
    pub policy: Option<TruncationPolicy>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingResult {
    pub label: String,
    pub max_rel_err: f64,
    pub worst_point: C64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub case_id: String,
    pub citation: String,
    pub tolerance: f64,
    pub per_binding: Vec<BindingResult>,
    /// Maximum over all bindings; `+∞` if any evaluation failed.
    pub max_rel_err: f64,
    pub worst_point: C64,
    pub pass: bool,
    pub erratum_note: Option<String>,
    pub wall_time: Duration,
}

impl CaseResult {
    /// First evaluator error, if any.
    pub fn diagnostic(&self) -> Option<String> {
        self.per_binding
            .iter()
            .find_map(|b| b.error.as_ref().map(|e| format!("[{}] {e}", b.label)))
    }
}

/// Runs one case. Evaluator errors end up in the result, never as panics.
pub fn run_case(case: &IdentityCase, overrides: &RunOverrides) -> CaseResult {
    let start = Instant::now();
    let tolerance = overrides.tolerance.unwrap_or(case.tolerance);
    let tau_set = overrides.tau_set.as_deref().unwrap_or(&DEFAULT_TAU_SET);
    let policy = overrides.policy.unwrap_or_default();
    let uses_tau = case.tau_grid != TauGrid::Unused;
    let mut per_binding = Vec::new();
    for b in case.param_grid(tau_set, &policy) {
        per_binding.push(run_binding(case, &b, uses_tau));
    }
    let mut max_rel_err: f64 = 0.0;
    let mut worst_point = C64::new(0.0, 0.0);
    for r in &per_binding {
        if r.error.is_some() {
            max_rel_err = f64::INFINITY;
        } else if r.max_rel_err > max_rel_err {
            max_rel_err = r.max_rel_err;
            worst_point = r.worst_point;
        }
    }
    let pass = !per_binding.is_empty()
        && per_binding.iter().all(|r| r.error.is_none() && r.max_rel_err <= tolerance);
    CaseResult {
        case_id: case.id.clone(),
        citation: case.citation.clone(),
        tolerance,
        per_binding,
        max_rel_err,
        worst_point,
        pass,
        erratum_note: case.erratum_note.clone(),
        wall_time: start.elapsed(),
    }
}

fn run_binding(case: &IdentityCase, b: &Binding, uses_tau: bool) -> BindingResult {
    let label = b.label(uses_tau);
    let outcome = (|| -> Result<(f64, C64)> {
        let points = case.sample_spec.points_for(b)?;
        if points.is_empty() {
            return Err(Error::InvalidParameter("no sample points".into()));
        }
        let mut worst = (0.0, points[0]);
        for z in points {
            let l = (case.lhs)(b, z)?;
            let r = (case.rhs)(b, z)?;
            let e = rel_err_floor(l, r, case.floor);
            if !e.is_finite() {
                return Err(Error::Instability(format!("non-finite comparison at z={z}: {l} vs {r}")));
            }
            if e > worst.0 {
                worst = (e, z);
            }
        }
        Ok(worst)
    })();
    match outcome {
        Ok((e, z)) => BindingResult { label, max_rel_err: e, worst_point: z, error: None },
        Err(err) => BindingResult {
            label,
            max_rel_err: f64::INFINITY,
            worst_point: C64::new(f64::NAN, f64::NAN),
            error: Some(err.to_string()),
        },
    }
}

/// Global run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub tau_set: Vec<C64>,
    pub tolerance: Option<f64>,
    pub policy: TruncationPolicy,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { tau_set: DEFAULT_TAU_SET.to_vec(), tolerance: None, policy: TruncationPolicy::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub filters: Vec<String>,
    pub config: SuiteConfig,
    pub cases: Vec<CaseResult>,
    pub summary: Summary,
}

/// Whether `filter` selects case `id`: `id` starts with it, and a filter
/// ending in a digit does not cut a number short. `EQ4` selects `EQ4` but
/// not `EQ41`; `EQ` selects every `EQ*` case; `EQ34` selects `EQ34_LIMIT`.
pub fn filter_matches(filter: &str, id: &str) -> bool {
    let digit = |c: char| c.is_ascii_digit();
    id.strip_prefix(filter)
        .is_some_and(|rest| !(filter.ends_with(digit) && rest.starts_with(digit)))
}

/// Runs every catalog case selected by one of `filters` (all cases if
/// `filters` is empty). Cases run in parallel; results keep catalog order.
pub fn run_suite(filters: &[String], config: &SuiteConfig) -> VerificationReport {
    let selected: Vec<IdentityCase> = build_catalog()
        .into_iter()
        .filter(|c| filters.is_empty() || filters.iter().any(|f| filter_matches(f, &c.id)))
        .collect();
    let overrides = RunOverrides {
        tolerance: config.tolerance,
        tau_set: Some(config.tau_set.clone()),
        policy: Some(config.policy),
    };
    let cases: Vec<CaseResult> = selected.par_iter().map(|c| run_case(c, &overrides)).collect();
    let passed = cases.iter().filter(|c| c.pass).count();
    VerificationReport {
        suite: if filters.is_empty() { "all".into() } else { filters.join(",") },
        filters: filters.to_vec(),
        config: config.clone(),
        summary: Summary { total: cases.len(), passed, failed: cases.len() - passed },
        cases,
    }
}
