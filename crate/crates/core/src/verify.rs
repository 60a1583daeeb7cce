//! The verification driver: named suites of exact checks over a loaded bundle, and
//! a report whose body is deterministic for a given bundle, degree and seed.

use std::fmt::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bundle::Bundle;
use crate::centre::{centre_verify, CentreReport, OperatorCentre};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::hopf::HopfCentre;
use crate::sobolev::certify;

pub type Check = std::result::Result<(), String>;

/// Suite names in report order.
pub const SUITES: [&str; 9] = ["action", "bullet", "centre", "connections", "ev-duality", "fgp-zigzag", "hopf", "sobolev", "theta"];

pub const DEFAULT_SEED: u64 = 1;

/// Random mixed-degree triples for the seeded associativity check.
pub const RANDOM_TRIPLES: usize = 100;

#[derive(Clone, Debug)]
pub struct Options {
    /// Empty selects every suite.
    pub suites: Vec<String>,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Options {
        Options { suites: Vec::new(), seed: DEFAULT_SEED }
    }
}

impl Options {
    /// The selected suites, deduplicated and in report order.
    pub fn selected(&self) -> Result<Vec<&'static str>> {
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::UnknownName(format!("suite {s}")));
            }
        }
        Ok(SUITES.iter().copied().filter(|s| self.suites.is_empty() || self.suites.iter().any(|x| x == s)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub check: String,
    pub subject: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Outcome>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Outcome> {
        self.checks.iter().filter(|o| !o.passed)
    }
}

/// Everything except timing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub bundle: String,
    pub digest: String,
    pub degree: usize,
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Clone, Debug)]
pub struct Timing {
    pub suites: Vec<(String, Duration)>,
    pub total: Duration,
}

#[derive(Serialize)]
struct JsonTiming<'a> {
    suite: &'a str,
    ms: u128,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    report: &'a Report,
    timing: Vec<JsonTiming<'a>>,
}

impl Report {
    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == name)
    }

    /// The report body alone, byte-identical across runs with the same inputs.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }

    /// `{"report": …, "timing": …}`.
    pub fn to_json(&self, timing: &Timing) -> String {
        let timing = timing.suites.iter().map(|(s, d)| JsonTiming { suite: s, ms: d.as_millis() }).collect();
        serde_json::to_string_pretty(&JsonDocument { report: self, timing }).expect("reports serialise")
    }

    pub fn to_text(&self, timing: &Timing) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bundle {} (sha256 {})", self.bundle, self.digest);
        let _ = writeln!(out, "degree {}, seed {}", self.degree, self.seed);
        for s in &self.suites {
            let t = timing.suites.iter().find(|(n, _)| *n == s.suite).map(|(_, d)| *d).unwrap_or_default();
            let failed = s.failures().count();
            let status = if s.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {:<12} {:>4} checks, {failed} failed  ({:.3} s)", s.suite, s.checks.len(), t.as_secs_f64());
            for o in s.failures() {
                let _ = writeln!(out, "     {} [{}]: {}", o.check, o.subject, o.witness.as_deref().unwrap_or(""));
            }
        }
        let _ = writeln!(out, "{} in {:.3} s", if self.passed { "all checks passed" } else { "FAILED" }, timing.total.as_secs_f64());
        out
    }
}

struct Suite {
    checks: Vec<Outcome>,
}

impl Suite {
    fn new() -> Suite {
        Suite { checks: Vec::new() }
    }

    /// Runs one check; a panic inside it is recorded as a failure.
    fn run(&mut self, check: &str, subject: impl Into<String>, f: impl FnOnce() -> Check) {
        let r = match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(p) => {
                let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
                Err(format!("internal error: {}", msg.unwrap_or_default()))
            }
        };
        self.checks.push(Outcome { check: check.into(), subject: subject.into(), passed: r.is_ok(), witness: r.err() });
    }

    fn absorb(&mut self, prefix: &str, r: CentreReport) {
        for o in r.outcomes {
            let subject = if prefix.is_empty() { o.subject } else { format!("{prefix} {}", o.subject) };
            self.checks.push(Outcome { check: o.axiom, subject, passed: o.witness.is_none(), witness: o.witness });
        }
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

/// Runs the selected suites on `g`, which must have been loaded from `b`.
pub fn verify_all(b: &Bundle, g: &Geometry, opts: &Options) -> Result<(Report, Timing)> {
    let start = Instant::now();
    let mut suites = Vec::new();
    let mut times = Vec::new();
    for name in opts.selected()? {
        let t = Instant::now();
        let mut s = Suite::new();
        run_suite(name, g, opts.seed, &mut s);
        times.push((name.to_string(), t.elapsed()));
        suites.push(SuiteReport { suite: name.to_string(), passed: s.checks.iter().all(|o| o.passed), checks: s.checks });
    }
    let report = Report {
        bundle: b.name.clone(),
        digest: b.digest(),
        degree: g.degree,
        seed: opts.seed,
        passed: suites.iter().all(|s| s.passed),
        suites,
    };
    Ok((report, Timing { suites: times, total: start.elapsed() }))
}

fn run_suite(name: &str, g: &Geometry, seed: u64, s: &mut Suite) {
    match name {
        "fgp-zigzag" => fgp_zigzag(g, s),
        "connections" => connections(g, s),
        "ev-duality" => ev_duality(g, s),
        "bullet" => bullet(g, seed, s),
        "action" => action(g, s),
        "theta" => theta(g, s),
        "centre" => centre(g, s),
        "hopf" => hopf(s),
        "sobolev" => sobolev(g, s),
        _ => unreachable!("suite names are checked by Options::selected"),
    }
}

fn fgp_zigzag(g: &Geometry, s: &mut Suite) {
    let sp = &g.spaces;
    s.run("zigzag-dual", "Vec", || g.dual.zigzag_dual(sp));
    s.run("zigzag-module", "Ω¹", || g.dual.zigzag_module(sp));
    s.run("idempotent", "P", || g.dual.idempotent(sp));
    for n in 1..=g.degree {
        s.run("zigzag", format!("n = {n}"), || g.check_zigzag_n(n));
    }
}

fn connections(g: &Geometry, s: &mut Suite) {
    s.run("dual-connection", "Vec", || g.check_dual_connection());
    s.run("coev-central", "coev(1)", || g.check_coev_central());
    for m in &g.modules {
        s.run("module", m.name.clone(), || m.validate(g).map_err(err));
        for n in 0..g.degree {
            s.run("nabla-step", format!("{}, n = {n}", m.name), || g.check_nabla_step_balanced(m, n));
        }
    }
    for e in g.modules.iter().filter(|m| m.sigma.is_some()) {
        for f in &g.modules {
            s.run("tensor-connection", format!("{} ⊗ {}", e.name, f.name), || g.check_tensor_connection_balanced(e, f));
        }
    }
}

fn ev_duality(g: &Geometry, s: &mut Suite) {
    s.run("duality", "ev", || g.check_duality());
    for n in 1..=g.degree {
        s.run("ev-leibniz", format!("n = {n}"), || g.check_ev_n_leibniz(n));
    }
}

fn bullet(g: &Geometry, seed: u64, s: &mut Suite) {
    s.run("unit", "1", || g.check_bullet_unit());
    s.run("well-defined", format!("total degree ≤ {}", g.degree), || g.check_bullet_well_defined(g.degree));
    s.run("associative", format!("basis triples, total degree ≤ {}", g.degree), || g.check_bullet_associative(g.degree));
    s.run("associative-random", format!("{RANDOM_TRIPLES} triples, seed {seed}"), || g.check_bullet_associative_random(seed, RANDOM_TRIPLES));
}

fn action(g: &Geometry, s: &mut Suite) {
    // Homogeneous products are exact in every degree, so `v•w` of degree 4 needs no truncation.
    let d = 2;
    for m in &g.modules {
        s.run("action", format!("{}, degree ≤ {d}", m.name), || g.check_action(m, d));
        s.run("action-lemma", format!("{}, degree ≤ {d}", m.name), || g.check_action_lemma(m, d));
    }
}

fn theta(g: &Geometry, s: &mut Suite) {
    let d = g.degree;
    for n in 0..=d {
        s.run("theta-algebra", format!("n = {n}"), || g.check_theta_algebra(n));
    }
    let braided: Vec<_> = g.modules.iter().filter(|m| m.sigma.is_some()).collect();
    for m in &braided {
        for n in 0..=d {
            s.run("properties", format!("{}, n = {n}", m.name), || g.check_theta_module_properties(m, n));
            s.run("top-block", format!("{}, n = {n}", m.name), || g.check_theta_top_block(m, n));
            s.run("inverse", format!("{}, n = {n}", m.name), || g.check_theta_inverse(m, n));
        }
        s.run("product", format!("{}, total degree ≤ {d}", m.name), || g.check_theta_product(m, d));
    }
    for e in &braided {
        for f in &braided {
            for n in 0..=d {
                s.run("crossing-action", format!("{} ⊗ {}, n = {n}", e.name, f.name), || g.check_theta_action(e, f, n));
                s.run("factorization", format!("{} ⊗ {}, n = {n}", e.name, f.name), || g.check_theta_factorization(e, f, n));
            }
        }
    }
}

fn centre(g: &Geometry, s: &mut Suite) {
    match OperatorCentre::standard(g) {
        Ok(c) => s.absorb("", centre_verify(&c)),
        Err(e) => s.run("objects", "standard test objects", || Err(err(e))),
    }
}

fn hopf(s: &mut Suite) {
    for c in [HopfCentre::z2(), HopfCentre::s3()] {
        let name = c.h.name.clone();
        s.run("hopf-axioms", name.clone(), || c.h.validate());
        for m in &c.modules {
            s.run("action-from-crossing", format!("{name} {}", m.name), || c.action_from_crossing(m));
        }
        s.absorb(&name, centre_verify(&c));
    }
}

/// For every declared inner product and state: `Gram(n)` and the increments
/// `Gram(n+1) − Gram(n)` are PSD for `n ≤ D`, and `Gram(n)` is positive definite
/// under a faithful state.
fn sobolev(g: &Geometry, s: &mut Suite) {
    let d = g.degree;
    for ip in &g.inner_products {
        let m = match g.module(&ip.module) {
            Ok(m) => m,
            Err(e) => {
                s.run("module", ip.module.clone(), || Err(err(e)));
                continue;
            }
        };
        for st in &g.states {
            let faithful = st.validate(g.algebra()).map(|r| r.faithful).unwrap_or(false);
            let subject = |what: String| format!("{} under {}, {what}", ip.module, st.name);
            let mut gram = None;
            for n in 0..=d + 1 {
                let term = match g.sobolev_term(&m, ip, st, n) {
                    Ok(t) => t,
                    Err(e) => {
                        s.run("gram", subject(format!("n = {n}")), || Err(err(e)));
                        break;
                    }
                };
                if n > 0 {
                    s.run("increment-psd", subject(format!("Gram({n}) − Gram({})", n - 1)), || certify(&term).map(|_| ()));
                }
                let total = match gram.take() {
                    None => term,
                    Some(prev) => crate::linalg::Mat::add(&prev, &term),
                };
                s.run("gram-psd", subject(format!("Gram({n})")), || certify(&total).map(|_| ()));
                if faithful {
                    s.run("gram-definite", subject(format!("Gram({n})")), || match certify(&total) {
                        Ok(c) if c.is_strictly_positive() => Ok(()),
                        Ok(c) => Err(format!("LDL pivots {:?} include zero", c.d.iter().map(|x| x.to_string()).collect::<Vec<_>>())),
                        Err(w) => Err(w),
                    });
                }
                gram = Some(total);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    #[test]
    fn unknown_suite_is_an_input_error() {
        let o = Options { suites: vec!["bullet".into(), "nope".into()], seed: 0 };
        assert!(matches!(o.selected(), Err(Error::UnknownName(_))));
    }

    #[test]
    fn selection_follows_report_order() {
        let o = Options { suites: vec!["theta".into(), "action".into(), "theta".into()], seed: 0 };
        assert_eq!(o.selected().unwrap(), vec!["action", "theta"]);
    }

    #[test]
    fn degenerate_bundle_passes_everything() {
        let b = builtins::degenerate();
        let g = Geometry::from_bundle(&b, None).unwrap();
        let (r, _) = verify_all(&b, &g, &Options::default()).unwrap();
        for s in &r.suites {
            assert!(s.passed, "{}: {:?}", s.suite, s.failures().collect::<Vec<_>>());
        }
        assert_eq!(r.suites.iter().map(|s| s.suite.as_str()).collect::<Vec<_>>(), SUITES.to_vec());
    }

    #[test]
    fn panics_become_failures() {
        let mut s = Suite::new();
        s.run("boom", "x", || panic!("kaboom"));
        assert!(!s.checks[0].passed);
        assert!(s.checks[0].witness.as_deref().unwrap().contains("kaboom"));
    }
}
