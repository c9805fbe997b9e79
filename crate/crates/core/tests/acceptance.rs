//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed; exits non-zero if any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use elliptic_identities::gammatrig::{gamma_fn, sine_product, GammaEvalConfig};
use elliptic_identities::identity_suite::{
    build_catalog, run_case, run_suite, CaseResult, IdentityCase, RunOverrides, SuiteConfig, DEFAULT_TAU_SET,
};
use elliptic_identities::lemma_engine::{
    contour_decay_probe, fit_log_polynomial, locate_zeros_poles, log_derivative, match_records, winding_number,
    FunctionHandle, Region,
};
use elliptic_identities::theta::{theta, ThetaKind};
use elliptic_identities::{TruncationPolicy, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn runtime(&mut self, elapsed: Duration, limit: Duration) {
        self.check(elapsed < limit, format!("runtime {elapsed:?} >= {limit:?}"));
    }
}

fn case(id: &str) -> IdentityCase {
    build_catalog().into_iter().find(|c| c.id == id).unwrap_or_else(|| panic!("no case {id}"))
}

fn run_at(id: &str, tol: f64) -> CaseResult {
    run_case(&case(id), &RunOverrides { tolerance: Some(tol), ..RunOverrides::default() })
}

fn check_case(o: &mut Outcome, id: &str, tol: f64) -> CaseResult {
    let r = run_at(id, tol);
    let mut msg = format!("{id} max rel err {:.3e} > {tol:.0e}", r.max_rel_err);
    for b in r.per_binding.iter().filter(|b| b.error.is_some() || b.max_rel_err > tol) {
        match &b.error {
            Some(e) => msg.push_str(&format!(" [{}: {e}]", b.label)),
            None => msg.push_str(&format!(" [{}: {:.2e}]", b.label, b.max_rel_err)),
        }
    }
    o.check(r.pass, msg);
    r
}

fn ns(id: &str) -> Vec<u32> {
    case(id).variants.iter().map(|b| b.n).collect()
}

fn gamma_catalog() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    for id in ["EQ3", "EQ4", "EQ5"] {
        o.check(case(id).sample_spec.count == 10, format!("{id} does not use 10 sample points"));
        check_case(&mut o, id, 1e-10);
    }
    o.check(ns("EQ5") == [2, 3, 4, 5], "EQ5 grid is not n = 2..5");
    let gauss = run_at("GAUSS_PSI", 1e-11);
    o.check(gauss.pass, format!("Gauss identity {:.3e}", gauss.max_rel_err));
    o.check(ns("GAUSS_PSI") == [3, 5], "Gauss identity grid is not n = 3, 5");
    o.runtime(t.elapsed(), Duration::from_secs(1));
    o
}

fn trig_catalog() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    for id in ["EQ6", "EQ7", "EQ8", "EQ9", "EQ10"] {
        o.check(ns(id) == [2, 3, 4, 6], format!("{id} grid is not n = 2, 3, 4, 6"));
        check_case(&mut o, id, 1e-10);
    }
    let euler = (sine_product(3) - 0.75).abs();
    o.check(euler < 1e-14, format!("∏sin(kπ/3) − 3/4 = {euler:e}"));
    o.runtime(t.elapsed(), Duration::from_secs(1));
    o
}

fn theta_core() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let p = TruncationPolicy::default();
    let points = [c(0.3, 0.1), c(-0.7, 0.4), c(1.1, -0.25), c(0.05, 0.6)];
    for &tau in &DEFAULT_TAU_SET {
        for kind in ThetaKind::ALL {
            let sign = if kind == ThetaKind::T1 { -1.0 } else { 1.0 };
            for &z in &points {
                let a = theta(kind, -z, tau, &p).unwrap();
                let b = sign * theta(kind, z, tau, &p).unwrap();
                let e = elliptic_identities::rel_err(a, b);
                o.check(e < 1e-10, format!("{kind:?} parity at τ={tau}, z={z}: {e:.2e}"));
            }
            // zeros at ((a + m) + (b + n)τ)π
            let (za, zb) = kind.zero_offset();
            let scale = theta(kind, c(0.4, 0.3), tau, &p).unwrap().norm();
            for (m, n) in [(0.0, 0.0), (1.0, 0.0), (-1.0, 1.0), (2.0, -1.0)] {
                let z = (c(za + m, 0.0) + tau * (zb + n)) * PI;
                let v = theta(kind, z, tau, &p).unwrap();
                // θ grows like e^{n²π Im τ} away from the strip; compare against the local size
                let local = theta(kind, z + 0.3, tau, &p).unwrap().norm().max(scale);
                o.check(v.norm() < 1e-10 * local, format!("{kind:?} zero at τ={tau}, {z}: {:.2e}", v.norm() / local));
            }
        }
    }
    let shifts: Vec<(i64, i64)> = case("EQ12").variants.iter().map(|b| b.shift).collect();
    o.check(shifts.len() == 4, "EQ12 needs four (m,n) pairs");
    for id in ["EQ12", "EQ21", "EQ24"] {
        check_case(&mut o, id, 1e-10);
    }
    o.runtime(t.elapsed(), Duration::from_secs(5));
    o
}

fn eisenstein() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    check_case(&mut o, "DELTA2_TRIPLE", 1e-9);
    o.check(ns("EQ23") == [4, 5, 6], "EQ23 grid is not 2j = 8, 10, 12");
    check_case(&mut o, "EQ23", 1e-8);
    check_case(&mut o, "DELTA2_SWAPPED", 1e-8);
    check_case(&mut o, "EQ44_ORDER", 1e-8);
    check_case(&mut o, "EQ15", 1e-10);
    o.runtime(t.elapsed(), Duration::from_secs(10));
    o
}

fn weierstrass() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    for id in ["EQ19", "EQ20", "EQ22", "EQ25", "EQ29", "EQ30", "EQ31", "EQ33"] {
        check_case(&mut o, id, 1e-8);
    }
    let a: Vec<C64> = case("THM2").variants.iter().map(|b| b.a).collect();
    for want in [c(0.0, 0.0), c(2.0, 1.0), c(-1.5, 0.0)] {
        o.check(a.contains(&want), format!("THM2 lacks a = {want}"));
    }
    check_case(&mut o, "THM2", 1e-7);
    check_case(&mut o, "COR1", 1e-7);
    check_case(&mut o, "REMARK2_LIMIT", 1e-6);
    o.runtime(t.elapsed(), Duration::from_secs(30));
    o
}

fn ntuple() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    for id in ["EQ32", "EQ34", "THM3_ODD", "THM3_EVEN", "THM3_EVEN_C1"] {
        check_case(&mut o, id, 1e-7);
    }
    o.check(ns("EQ41") == [2, 3] && ns("EQ42_43") == [2, 3], "EQ41/EQ42_43 grid is not n = 2, 3");
    check_case(&mut o, "EQ41", 1e-8);
    check_case(&mut o, "EQ42_43", 1e-8);
    check_case(&mut o, "EQ34_LIMIT", 1e-6);
    o.runtime(t.elapsed(), Duration::from_secs(60));
    o
}

fn modular() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let p = TruncationPolicy::default();
    let region = Region::new(c(0.3, 0.1), c(1.2, 0.6)).unwrap();
    let target = c(0.0, PI / 4.0);
    for &tau in &DEFAULT_TAU_SET {
        let f = FunctionHandle::new("θ₁(z|τ+1)", move |z: C64| theta(ThetaKind::T1, z, tau + 1.0, &p));
        let g = FunctionHandle::new("θ₁(z|τ)", move |z: C64| theta(ThetaKind::T1, z, tau, &p));
        match fit_log_polynomial(&f, &g, &region, 2, 64) {
            Ok(fit) => {
                let e = (fit.coefficients[0] - target).norm();
                let higher = fit.coefficients[1].norm().max(fit.coefficients[2].norm());
                o.check(higher < 1e-9, format!("EQ45 c₁, c₂ not zero ({higher:.2e}) at τ={tau}"));
                o.check(fit.residual < 1e-9, format!("EQ45 residual {:.2e} at τ={tau}", fit.residual));
                o.check(e < 1e-9, format!("EQ45 constant off by {e:.2e} at τ={tau}"));
            }
            Err(e) => o.check(false, format!("EQ45 fit at τ={tau}: {e}")),
        }
    }
    check_case(&mut o, "EQ46", 1e-9);
    let off_axis = run_case(
        &case("EQ46"),
        &RunOverrides { tolerance: Some(1e-9), tau_set: Some(vec![c(0.4, 1.2)]), ..RunOverrides::default() },
    );
    o.check(off_axis.pass, format!("EQ46 at τ=0.4+1.2i: {:.2e}", off_axis.max_rel_err));
    check_case(&mut o, "EQ47", 1e-10);
    check_case(&mut o, "EQ48", 1e-10);
    o.runtime(t.elapsed(), Duration::from_secs(10));
    o
}

fn lemma_engine() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let gcfg = GammaEvalConfig::default();

    let mixed = FunctionHandle::new("sin·Γ", move |z: C64| Ok(z.sin() * gamma_fn(z, &gcfg)?));
    let mut worst: f64 = 0.0;
    let mut total = 0i64;
    for i in 0..10 {
        for j in 0..10 {
            let ll = c(-5.05 + i as f64, -2.03 + 0.41 * j as f64);
            let cell = Region::new(ll, ll + c(1.0, 0.41)).unwrap();
            match winding_number(&mixed, &cell) {
                Ok(w) => {
                    worst = worst.max((w.re - w.re.round()).abs()).max(w.im.abs());
                    total += w.re.round() as i64;
                }
                Err(e) => o.check(false, format!("winding on {ll}: {e}")),
            }
        }
    }
    o.check(worst < 0.05, format!("winding off an integer by {worst:.3}"));
    // zeros ±π and poles −1..−5 of sin·Γ in [−5.05, 4.95]; zero and pole at 0 cancel
    o.check(total == 2 - 5, format!("net winding {total}, expected −3"));

    let sin = FunctionHandle::new("sin", |z: C64| Ok(z.sin()));
    let region = Region::new(c(-10.0, -1.0), c(10.0, 1.0)).unwrap();
    match locate_zeros_poles(&sin, &region, 1.0, 1e-8) {
        Ok(found) => {
            let ok = found.len() == 7
                && found.iter().zip(-3..=3).all(|(r, k)| r.order == 1 && (r.location - c(k as f64 * PI, 0.0)).norm() < 1e-6);
            o.check(ok, format!("sin zero table {found:?}"));
        }
        Err(e) => o.check(false, format!("sin locator: {e}")),
    }
    let gamma = FunctionHandle::new("Γ", move |z: C64| gamma_fn(z, &gcfg));
    let region = Region::new(c(-4.5, -1.0), c(2.5, 1.0)).unwrap();
    match locate_zeros_poles(&gamma, &region, 1.0, 1e-8) {
        Ok(found) => {
            let ok = found.len() == 5
                && found.iter().zip(-4..=0).all(|(r, k)| r.order == -1 && (r.location - c(k as f64, 0.0)).norm() < 1e-6);
            o.check(ok, format!("Γ pole table {found:?}"));
        }
        Err(e) => o.check(false, format!("Γ locator: {e}")),
    }

    let (c0, c1, c2) = (c(0.3, 0.2), c(1.0, -2.0), c(0.5, 0.0));
    let f = FunctionHandle::new("e^P sin", move |z: C64| Ok((c0 + c1 * z + c2 * z * z).exp() * z.sin()));
    let region = Region::new(c(0.4, -0.5), c(2.2, 0.7)).unwrap();
    match fit_log_polynomial(&f, &sin, &region, 2, 64) {
        Ok(fit) => {
            let e = fit.coefficients.iter().zip([c0, c1, c2]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            o.check(fit.residual < 1e-10, format!("fit residual {:.2e}", fit.residual));
            o.check(e < 1e-9, format!("fit coefficients off by {e:.2e}"));
        }
        Err(e) => o.check(false, format!("fit: {e}")),
    }

    let sizes: Vec<f64> = (1..=4).map(|k| (k as f64 + 0.5) * PI).collect();
    match contour_decay_probe(&sin, c(0.3, 0.2), 3, &sizes) {
        Ok(v) => {
            let mags: Vec<f64> = v.iter().map(|x| x.norm()).collect();
            o.check(mags.windows(2).all(|w| w[1] < w[0]), format!("probe magnitudes {mags:?}"));
        }
        Err(e) => o.check(false, format!("probe: {e}")),
    }
    o.runtime(t.elapsed(), Duration::from_secs(30));
    o
}

fn gamma_pipeline() -> Outcome {
    let mut o = Outcome::new();
    let gcfg = GammaEvalConfig::default();
    let f = FunctionHandle::new("Γ(2z)", move |z: C64| gamma_fn(2.0 * z, &gcfg));
    let g = FunctionHandle::new("Γ(z)Γ(z+1/2)", move |z: C64| Ok(gamma_fn(z, &gcfg)? * gamma_fn(z + 0.5, &gcfg)?));
    let region = Region::new(c(0.2, -1.0), c(3.0, 1.0)).unwrap();
    match (locate_zeros_poles(&f, &region, 0.5, 1e-8), locate_zeros_poles(&g, &region, 0.5, 1e-8)) {
        (Ok(a), Ok(b)) => {
            let m = match_records(&a, &b, 1e-6);
            o.check(a.is_empty() && b.is_empty() && m.success, format!("records {a:?} / {b:?}"));
        }
        (Err(e), _) | (_, Err(e)) => o.check(false, format!("locator: {e}")),
    }
    for z in [c(0.8, 0.0), c(1.3, 0.4), c(2.1, -0.6)] {
        match (log_derivative(&f, z, 2, 1e-3), log_derivative(&g, z, 2, 1e-3)) {
            (Ok(a), Ok(b)) => {
                let e = elliptic_identities::rel_err(a, b);
                o.check(e < 1e-7, format!("second log-derivative at {z}: {e:.2e}"));
            }
            (Err(e), _) | (_, Err(e)) => o.check(false, format!("log-derivative at {z}: {e}")),
        }
    }
    // ln(Γ(z)Γ(z+1/2)/Γ(2z)) = C₁z + ln C₂ from its values at z = 1/2 and z = 1
    let lr = |z: f64| -> C64 {
        let z = c(z, 0.0);
        (g.eval(z).unwrap() / f.eval(z).unwrap()).ln()
    };
    let (v_half, v_one) = (lr(0.5), lr(1.0));
    let c1 = 2.0 * (v_one - v_half);
    let c2 = (v_one - c1).exp();
    let e1 = (c1 - c(-2.0 * LN_2, 0.0)).norm();
    let e2 = (c2 - c(2.0 * PI.sqrt(), 0.0)).norm();
    o.check(e1 < 1e-9, format!("C₁ off by {e1:.2e}"));
    o.check(e2 < 1e-9, format!("C₂ off by {e2:.2e}"));
    o
}

fn full_suite() -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    let report = run_suite(&[], &SuiteConfig::default());
    o.check(report.summary.total >= 38, format!("only {} cases", report.summary.total));
    let failed: Vec<&str> = report.cases.iter().filter(|c| !c.pass).map(|c| c.case_id.as_str()).collect();
    o.check(failed.is_empty(), format!("{}/{} passed, failing: {}", report.summary.passed, report.summary.total, failed.join(", ")));

    let dir = std::env::temp_dir().join(format!("ellid-acceptance-{}", std::process::id()));
    let _ = std::fs::create_dir_all(&dir);
    let out = dir.join("report.json");
    match Command::new(env!("CARGO_BIN_EXE_ellid")).args(["verify", "--format", "json", "--out"]).arg(&out).status() {
        Ok(status) => {
            o.check(status.code() == Some(0), format!("`verify --format json` exit code {:?}", status.code()));
            let parsed = std::fs::read_to_string(&out)
                .ok()
                .and_then(|s| serde_json::from_str::<serde_json::Value>(&s).ok());
            o.check(parsed.is_some(), "report is not valid JSON");
        }
        Err(e) => o.check(false, format!("cannot run ellid: {e}")),
    }
    let _ = std::fs::remove_dir_all(&dir);
    o.runtime(t.elapsed(), Duration::from_secs(180));
    o
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("gamma catalog", gamma_catalog),
        ("trig catalog", trig_catalog),
        ("theta core", theta_core),
        ("eisenstein", eisenstein),
        ("weierstrass identities", weierstrass),
        ("n-tuple theorems", ntuple),
        ("modular and triple product", modular),
        ("lemma engine properties", lemma_engine),
        ("gamma duplication pipeline", gamma_pipeline),
        ("full suite green", full_suite),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        let detail = if o.detail.is_empty() { String::new() } else { format!(" :: {}", o.detail) };
        println!("criterion {:>2} {status} {name} ({:.2?}){detail}", k + 1, t.elapsed());
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
