//! Running scenarios and suites and rendering their reports.

pub mod checks;
pub mod random;
pub mod suites;

use std::fmt::Write as _;

use serde_json::{json, Value};

pub use checks::{is_input_error, run_check, CheckOutcome};
pub use suites::{run_suite, SuiteOutcome, SUITES};

use crate::error::Error;
use crate::registry::examples;
use crate::scenario::{InputError, Scenario};

pub const DEFAULT_PRIMES: &[u64] = &[3, 5, 7];
pub const DEFAULT_SEED: u64 = 42;

/// Exit status for a passing run.
pub const EXIT_PASS: i32 = 0;
/// Exit status when a check or suite case fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for malformed or inconsistent input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Debug)]
pub struct Options {
    pub prime: Option<u64>,
    pub seed: u64,
    pub degree_cap: Option<u32>,
}

impl Default for Options {
    fn default() -> Self {
        Options { prime: None, seed: DEFAULT_SEED, degree_cap: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub enum Report {
    Run { scenario: String, prime: u64, seed: u64, checks: Vec<CheckOutcome> },
    Verify { suite: String, seed: u64, outcomes: Vec<SuiteOutcome> },
}

impl Report {
    pub fn ok(&self) -> bool {
        match self {
            Report::Run { checks, .. } => checks.iter().all(|c| c.ok),
            Report::Verify { outcomes, .. } => outcomes.iter().all(SuiteOutcome::ok),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Report::Run { scenario, prime, seed, checks } => json!({
                "kind": "run",
                "scenario": scenario,
                "prime": prime,
                "seed": seed,
                "checks": checks.iter().map(CheckOutcome::to_json).collect::<Vec<_>>(),
                "result": self.ok(),
            }),
            Report::Verify { suite, seed, outcomes } => json!({
                "kind": "verify",
                "suite": suite,
                "seed": seed,
                "suites": outcomes.iter().map(SuiteOutcome::to_json).collect::<Vec<_>>(),
                "result": self.ok(),
            }),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Run { scenario, prime, checks, .. } => {
                let _ = writeln!(s, "scenario {scenario} (p = {prime})");
                for c in checks {
                    let _ = writeln!(s, "  {}  {:<15} {}", status(c.ok), c.check, c.summary);
                }
                let failed = checks.iter().filter(|c| !c.ok).count();
                let _ = writeln!(s, "result: {} ({} of {} checks passed)", status(self.ok()), checks.len() - failed, checks.len());
            }
            Report::Verify { outcomes, seed, .. } => {
                let _ = writeln!(s, "{:<14} {:>3} {:>6} {:>7}  status", "suite", "p", "cases", "passed");
                for o in outcomes {
                    let _ = writeln!(s, "{:<14} {:>3} {:>6} {:>7}  {}", o.suite, o.prime, o.cases, o.passed, status(o.ok()));
                }
                for o in outcomes.iter().filter(|o| !o.ok()) {
                    for f in &o.failures {
                        let _ = writeln!(s, "  {} p = {}: {f}", o.suite, o.prime);
                    }
                }
                let _ = writeln!(s, "seed {seed}; result: {}", status(self.ok()));
            }
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut out = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
                out.push('\n');
                out
            }
            Format::Text => self.to_text(),
        }
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Runs `checks` (or the scenario's own list, or `theorem`) in order.
pub fn run_scenario(s: &Scenario, checks: &[String], opts: &Options) -> Result<Report, InputError> {
    let requested: Vec<String> = if !checks.is_empty() {
        checks.to_vec()
    } else if !s.checks.is_empty() {
        s.checks.clone()
    } else {
        vec!["theorem".to_string()]
    };
    let mut outcomes = Vec::new();
    for name in &requested {
        if !crate::scenario::CHECKS.contains(&name.as_str()) {
            return Err(InputError {
                location: "--check".into(),
                error: Error::Invalid(format!("unknown check `{name}`; known checks are {}", crate::scenario::CHECKS.join(", "))),
            });
        }
        match run_check(s, name, opts) {
            Ok(o) => outcomes.push(o),
            Err(e) if is_input_error(&e) => return Err(InputError { location: format!("check `{name}`"), error: e }),
            Err(e) => outcomes.push(CheckOutcome { check: name.clone(), ok: false, summary: e.to_string(), detail: Value::Null }),
        }
    }
    Ok(Report::Run { scenario: s.name.clone(), prime: s.prime, seed: opts.seed, checks: outcomes })
}

/// Runs one suite, or all of them, at each selected prime.
pub fn verify(suite: &str, opts: &Options) -> Result<Report, InputError> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => {
            return Err(InputError {
                location: "--suite".into(),
                error: Error::Invalid(format!("unknown suite `{other}`; known suites are all, {}", SUITES.join(", "))),
            })
        }
    };
    let primes: Vec<u64> = match opts.prime {
        Some(p) => vec![p],
        None => DEFAULT_PRIMES.to_vec(),
    };
    for &p in &primes {
        if !crate::ring::is_prime(p) || !(3..=crate::ring::MAX_PRIME).contains(&p) {
            return Err(InputError {
                location: "--prime".into(),
                error: Error::Invalid(format!("{p} is not an odd prime up to {}", crate::ring::MAX_PRIME)),
            });
        }
    }
    let mut outcomes = Vec::new();
    for name in names {
        for &p in &primes {
            outcomes.push(run_suite(name, p, opts).map_err(|e| InputError { location: format!("suite {name}"), error: e })?);
        }
    }
    Ok(Report::Verify { suite: suite.to_string(), seed: opts.seed, outcomes })
}

/// The registry listing: names, summaries and the statements each exercises.
pub fn list_examples(format: Format) -> String {
    match format {
        Format::Json => {
            let v: Vec<Value> =
                examples().iter().map(|e| json!({"name": e.name, "summary": e.summary, "exercises": e.cites})).collect();
            let mut out = serde_json::to_string_pretty(&v).expect("listing serializes");
            out.push('\n');
            out
        }
        Format::Text => {
            let mut s = String::new();
            for e in examples() {
                let _ = writeln!(s, "{:<22} {}", e.name, e.summary);
                let _ = writeln!(s, "{:<22} exercises: {}", "", e.cites.join(", "));
            }
            s
        }
    }
}
