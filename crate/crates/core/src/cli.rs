//! `ellid verify`: run identity suites and report in text or JSON.
//!
//! Exit codes: 0 all cases pass, 1 some case fails, 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::eisenstein::TruncationPolicy;
use crate::identity_suite::{run_suite, SuiteConfig, VerificationReport, DEFAULT_TAU_SET};
use crate::C64;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ellid", version, about = "Numerically verify theta, Weierstrass, gamma and trigonometric identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run identity cases and report the largest relative error of each.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Case id prefix to run (repeatable); all cases if omitted.
    #[arg(long = "suite", value_name = "PREFIX")]
    suite: Vec<String>,
    /// Modular parameter τ (repeatable), e.g. `1.2i`, `0.3+1.1i`.
    #[arg(long = "tau", value_name = "C", value_parser = parse_tau)]
    tau: Vec<C64>,
    /// Relative tolerance replacing every case tolerance.
    #[arg(long = "tol", value_name = "R", value_parser = parse_tol)]
    tol: Option<f64>,
    /// Half-width of the square lattice truncation.
    #[arg(long = "radius", value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    radius: Option<u32>,
    #[arg(long = "format", value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long = "out", value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub filters: Vec<String>,
    pub tau_set: Vec<C64>,
    pub tolerance: Option<f64>,
    pub radius: Option<u32>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl CliConfig {
    pub fn suite_config(&self) -> SuiteConfig {
        let mut policy = TruncationPolicy::default();
        if let Some(r) = self.radius {
            policy.lattice_radius = r;
        }
        SuiteConfig { tau_set: self.tau_set.clone(), tolerance: self.tolerance, policy }
    }
}

/// Why argument parsing stopped without a config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseStop {
    /// `--help` or `--version`; print and exit 0.
    Info(String),
    /// Invalid input; print and exit 2.
    Usage(String),
}

/// Parses a complex literal: `a`, `bi`, `a+bi` or `a-bi` with decimal floats.
pub fn parse_complex(token: &str) -> Result<C64, String> {
    let bad = || format!("malformed complex literal '{token}'");
    let s = token.trim();
    if s.is_empty() {
        return Err(bad());
    }
    let num = |t: &str| -> Result<f64, String> {
        if t.is_empty() || !t.bytes().any(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad)
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(num(s)?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (num(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => num(t)?,
    };
    Ok(C64::new(re, im))
}

fn parse_tau(token: &str) -> Result<C64, String> {
    let tau = parse_complex(token)?;
    if tau.im <= 0.0 {
        return Err(format!("'{token}' has Im τ <= 0; τ must lie in the upper half-plane"));
    }
    Ok(tau)
}

fn parse_tol(token: &str) -> Result<f64, String> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("'{token}' is not a positive tolerance")),
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, ParseStop>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp
        | clap::error::ErrorKind::DisplayVersion
        | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ParseStop::Info(e.to_string()),
        _ => ParseStop::Usage(e.to_string()),
    })?;
    let Command::Verify(v) = cli.command;
    Ok(CliConfig {
        filters: v.suite,
        tau_set: if v.tau.is_empty() { DEFAULT_TAU_SET.to_vec() } else { v.tau },
        tolerance: v.tol,
        radius: v.radius,
        format: v.format,
        out: v.out,
    })
}

fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format!("{x:.16e}") } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
struct JsonComplex {
    re: Box<RawValue>,
    im: Box<RawValue>,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        Self { re: num(z.re), im: num(z.im) }
    }
}

#[derive(Serialize)]
struct JsonTruncation {
    lattice_radius: u32,
    series_tol: Box<RawValue>,
    max_terms: u32,
}

#[derive(Serialize)]
struct JsonConfig {
    filters: Vec<String>,
    tau_set: Vec<JsonComplex>,
    tolerance: Option<Box<RawValue>>,
    truncation: JsonTruncation,
}

#[derive(Serialize)]
struct JsonCase {
    id: String,
    citation: String,
    max_rel_err: Box<RawValue>,
    worst_point: JsonComplex,
    pass: bool,
}

#[derive(Serialize)]
struct JsonSummary {
    total: usize,
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct JsonReport {
    suite: String,
    config: JsonConfig,
    cases: Vec<JsonCase>,
    summary: JsonSummary,
}

/// The JSON document for a report; byte-identical for identical inputs.
pub fn report_json(report: &VerificationReport) -> String {
    let cfg = &report.config;
    let doc = JsonReport {
        suite: report.suite.clone(),
        config: JsonConfig {
            filters: report.filters.clone(),
            tau_set: cfg.tau_set.iter().map(|&t| t.into()).collect(),
            tolerance: cfg.tolerance.map(num),
            truncation: JsonTruncation {
                lattice_radius: cfg.policy.lattice_radius,
                series_tol: num(cfg.policy.series_tol),
                max_terms: cfg.policy.max_terms,
            },
        },
        cases: report
            .cases
            .iter()
            .map(|c| JsonCase {
                id: c.case_id.clone(),
                citation: c.citation.clone(),
                max_rel_err: num(c.max_rel_err),
                worst_point: c.worst_point.into(),
                pass: c.pass,
            })
            .collect(),
        summary: JsonSummary {
            total: report.summary.total,
            passed: report.summary.passed,
            failed: report.summary.failed,
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// Human-readable table plus an `N/M passed` line.
pub fn report_text(report: &VerificationReport) -> String {
    let mut s = String::new();
    let width = report.cases.iter().map(|c| c.case_id.chars().count()).max().unwrap_or(2).max(2);
    let _ = writeln!(s, "{:<width$}  {:>12}  {:<4}  citation", "id", "max rel err", "pass");
    for c in &report.cases {
        let err = if c.max_rel_err.is_finite() { format!("{:.3e}", c.max_rel_err) } else { "error".into() };
        let flag = if c.pass { "ok" } else { "FAIL" };
        let _ = writeln!(s, "{:<width$}  {:>12}  {:<4}  {}", c.case_id, err, flag, c.citation);
        if !c.pass {
            for b in c.per_binding.iter().filter(|b| b.error.is_some() || b.max_rel_err > c.tolerance) {
                match &b.error {
                    Some(e) => {
                        let _ = writeln!(s, "{:width$}    [{}] {e}", "", b.label);
                    }
                    None => {
                        let _ = writeln!(s, "{:width$}    [{}] {:.3e} > {:.0e}", "", b.label, b.max_rel_err, c.tolerance);
                    }
                }
            }
        }
        if let Some(note) = &c.erratum_note {
            let _ = writeln!(s, "{:width$}    note: {note}", "");
        }
    }
    let _ = writeln!(s, "{}/{} passed", report.summary.passed, report.summary.total);
    s
}

/// Writes the report where the config says and returns the exit code.
pub fn emit_report(report: &VerificationReport, config: &CliConfig) -> i32 {
    let body = match config.format {
        Format::Text => report_text(report),
        Format::Json => report_json(report),
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, body.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).and_then(|_| out.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("ellid: cannot write report: {e}");
        return EXIT_IO;
    }
    if report.summary.failed == 0 {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Entry point behind the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(ParseStop::Info(text)) => {
            print!("{text}");
            return EXIT_PASS;
        }
        Err(ParseStop::Usage(text)) => {
            eprint!("{text}");
            return EXIT_USAGE;
        }
    };
    let report = run_suite(&config.filters, &config.suite_config());
    emit_report(&report, &config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn complex_grammar() {
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_complex("1.2i").unwrap(), c(0.0, 1.2));
        assert_eq!(parse_complex("-0.4+0.9i").unwrap(), c(-0.4, 0.9));
        assert_eq!(parse_complex("0.5-0.3i").unwrap(), c(0.5, -0.3));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("2-i").unwrap(), c(2.0, -1.0));
        for bad in ["", "abc", "1+2", "1.2.3i", "1+i2", "nan", "infi", "1++2i"] {
            let e = parse_complex(bad).unwrap_err();
            assert!(e.contains(&format!("'{bad}'")), "{e}");
        }
    }

    #[test]
    fn parse_examples() {
        let cfg = parse_args(["ellid", "verify", "--suite", "EQ4", "--tau", "1.2i"]).unwrap();
        assert_eq!(cfg.filters, ["EQ4"]);
        assert_eq!(cfg.tau_set, [c(0.0, 1.2)]);
        assert_eq!(cfg.format, Format::Text);

        let cfg = parse_args(["ellid", "verify", "--format", "json", "--out", "report.json"]).unwrap();
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.out, Some(PathBuf::from("report.json")));
        assert_eq!(cfg.tau_set, DEFAULT_TAU_SET.to_vec());

        let cfg = parse_args(["ellid", "verify", "--tol", "1e-9", "--radius", "30"]).unwrap();
        assert_eq!(cfg.tolerance, Some(1e-9));
        assert_eq!(cfg.suite_config().policy.lattice_radius, 30);
    }

    #[test]
    fn parse_rejections() {
        let usage = |argv: &[&str]| matches!(parse_args(argv.iter().copied()), Err(ParseStop::Usage(_)));
        assert!(usage(&["ellid", "verify", "--tau", "0.5-0.3i"]));
        assert!(usage(&["ellid", "verify", "--tau", "0.5"]));
        assert!(usage(&["ellid", "verify", "--bogus"]));
        assert!(usage(&["ellid", "verify", "--format", "xml"]));
        assert!(usage(&["ellid", "verify", "--tol", "-1"]));
        assert!(usage(&["ellid", "verify", "--radius", "0"]));
        assert!(usage(&["ellid", "frobnicate"]));
        match parse_args(["ellid", "verify", "--tau", "1+x"]) {
            Err(ParseStop::Usage(m)) => assert!(m.contains("'1+x'"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_args(["ellid", "--help"]), Err(ParseStop::Info(_))));
        assert!(matches!(parse_args(["ellid", "verify", "--help"]), Err(ParseStop::Info(_))));
    }

    #[test]
    fn json_round_trip_and_stability() {
        let cfg = SuiteConfig::default();
        let report = run_suite(&["EQ4".into(), "EQ21".into()], &cfg);
        let a = report_json(&report);
        assert_eq!(a, report_json(&run_suite(&["EQ4".into(), "EQ21".into()], &cfg)));
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        let pos: Vec<usize> = ["\"suite\"", "\"config\"", "\"cases\"", "\"summary\""]
            .iter()
            .map(|k| a.find(k).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
        let cases = v["cases"].as_array().unwrap();
        assert_eq!(cases.len(), report.cases.len());
        for (j, r) in cases.iter().zip(&report.cases) {
            assert_eq!(j["id"], r.case_id.as_str());
            assert_eq!(j["max_rel_err"].as_f64().unwrap(), r.max_rel_err);
            assert_eq!(j["worst_point"]["re"].as_f64().unwrap(), r.worst_point.re);
            assert_eq!(j["worst_point"]["im"].as_f64().unwrap(), r.worst_point.im);
            assert_eq!(j["pass"], r.pass);
        }
        assert_eq!(v["summary"]["total"], 2);
        assert!(v["config"]["tolerance"].is_null());
    }

    #[test]
    fn non_finite_is_null() {
        assert_eq!(num(f64::INFINITY).get(), "null");
        assert_eq!(num(f64::NAN).get(), "null");
        assert_eq!(num(0.1).get().parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn text_report_and_exit_codes() {
        let report = run_suite(&["EQ6".into()], &SuiteConfig::default());
        let text = report_text(&report);
        assert!(text.contains("EQ6"));
        assert!(text.trim_end().ends_with("1/1 passed"));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let mut cfg = parse_args(["ellid", "verify", "--format", "json"]).unwrap();
        cfg.out = Some(path.clone());
        assert_eq!(emit_report(&report, &cfg), EXIT_PASS);
        assert!(std::fs::read_to_string(&path).unwrap().contains("\"EQ6\""));

        let failing = run_suite(&["EQ4".into()], &SuiteConfig { tolerance: Some(1e-300), ..SuiteConfig::default() });
        assert_eq!(emit_report(&failing, &cfg), EXIT_FAIL);
        assert!(report_text(&failing).contains("FAIL"));

        cfg.out = Some(dir.path().join("missing").join("r.json"));
        assert_eq!(emit_report(&report, &cfg), EXIT_IO);
    }

    #[test]
    fn usage_exit_code() {
        assert_eq!(run(["ellid", "verify", "--tau", "-1i"]), EXIT_USAGE);
        assert_eq!(run(["ellid", "--help"]), EXIT_PASS);
    }
}
