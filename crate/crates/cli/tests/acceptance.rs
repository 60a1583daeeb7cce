//! Acceptance criteria 1 to 10, one PASS/FAIL line each. Budgets are wall-clock
//! limits and include loading the bundle.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ncdiff::verify::{verify_all, Options};
use ncdiff::{builtins, faults, Bundle, Geometry};

struct Outcome {
    ok: bool,
    elapsed: Duration,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { ok: true, elapsed: Duration::ZERO, notes: Vec::new() }
    }

    fn fail(&mut self, note: String) {
        self.ok = false;
        self.notes.push(note);
    }

    fn require(&mut self, cond: bool, note: impl FnOnce() -> String) {
        if !cond {
            self.fail(note());
        }
    }
}

/// Runs `suites` on every bundle, each loaded afresh. `budget` applies per bundle
/// when `per_bundle`, otherwise to the whole run.
fn run_suites(bundles: &[Bundle], suites: &[&str], budget: Duration, per_bundle: bool) -> Outcome {
    let mut out = Outcome::new();
    let opts = Options { suites: suites.iter().map(|s| s.to_string()).collect(), seed: 1 };
    for b in bundles {
        let t = Instant::now();
        let g = match Geometry::from_bundle(b, None) {
            Ok(g) => g,
            Err(e) => {
                out.fail(format!("{}: {e}", b.name));
                continue;
            }
        };
        match verify_all(b, &g, &opts) {
            Ok((report, _)) => {
                for s in &report.suites {
                    for o in s.failures() {
                        out.fail(format!("{} {} {} [{}]: {}", b.name, s.suite, o.check, o.subject, o.witness.as_deref().unwrap_or("")));
                    }
                }
            }
            Err(e) => out.fail(format!("{}: {e}", b.name)),
        }
        let dt = t.elapsed();
        out.elapsed += dt;
        if per_bundle && dt > budget {
            out.fail(format!("{} took {:.2} s, budget {:.0} s", b.name, dt.as_secs_f64(), budget.as_secs_f64()));
        }
    }
    if !per_bundle && out.elapsed > budget {
        let e = out.elapsed;
        out.fail(format!("took {:.2} s, budget {:.0} s", e.as_secs_f64(), budget.as_secs_f64()));
    }
    out
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn sobolev_two_point() -> Outcome {
    let t = Instant::now();
    let mut out = Outcome::new();
    let b = builtins::two_point();
    let g = Geometry::from_bundle(&b, None).expect("builtin loads");
    let (report, _) = verify_all(&b, &g, &Options { suites: vec!["sobolev".into()], seed: 1 }).expect("suite exists");
    let checks = &report.suite("sobolev").expect("selected").checks;
    for o in checks.iter().filter(|o| !o.passed) {
        out.fail(format!("{} [{}]: {}", o.check, o.subject, o.witness.as_deref().unwrap_or("")));
    }
    for ip in &g.inner_products {
        for n in 0..=3 {
            let passed = |check: &str, subject: String| checks.iter().any(|o| o.check == check && o.subject == subject && o.passed);
            for state in ["uniform", "point0"] {
                out.require(passed("gram-psd", format!("{} under {state}, Gram({n})", ip.module)), || {
                    format!("{} under {state}: Gram({n}) PSD not certified", ip.module)
                });
                if n > 0 {
                    let subject = format!("{} under {state}, Gram({n}) − Gram({})", ip.module, n - 1);
                    out.require(passed("increment-psd", subject), || format!("{} under {state}: increment {n} not certified", ip.module));
                }
            }
            out.require(passed("gram-definite", format!("{} under uniform, Gram({n})", ip.module)), || {
                format!("{}: Gram({n}) not strictly positive under uniform", ip.module)
            });
        }
    }
    out.elapsed = t.elapsed();
    let e = out.elapsed;
    out.require(e <= secs(5), || format!("took {:.2} s, budget 5 s", e.as_secs_f64()));
    out
}

fn fault_injection() -> Outcome {
    let t = Instant::now();
    let mut out = Outcome::new();
    for f in faults::all() {
        match f.detect() {
            Ok(w) => out.notes.push(format!("{} -> [{}] {w}", f.name, f.check)),
            Err(e) => out.fail(e),
        }
    }
    out.elapsed = t.elapsed();
    out
}

fn report_body(seed: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ncdiff"))
        .args(["verify", "builtin:two-point-universal", "--json", "--seed", seed])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit status {}", out.status));
    }
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    doc.get("report").map(|r| r.to_string()).ok_or_else(|| "no report field".to_string())
}

fn deterministic_reports() -> Outcome {
    let t = Instant::now();
    let mut out = Outcome::new();
    match (report_body("7"), report_body("7"), report_body("8")) {
        (Ok(a), Ok(b), Ok(c)) => {
            out.require(a == b, || "report bodies differ for seed 7".into());
            out.require(a != c, || "seed is not reflected in the report".into());
        }
        (a, b, c) => {
            for e in [a, b, c].into_iter().filter_map(Result::err) {
                out.fail(e);
            }
        }
    }
    out.elapsed = t.elapsed();
    out
}

fn main() -> ExitCode {
    let all = builtins::all();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("zigzags and P² = P on all builtins, < 1 s per bundle", Box::new(|| run_suites(&all, &["fgp-zigzag"], secs(1), true))),
        ("duality and d∘ev for n = 1, 2, 3, < 5 s", Box::new(|| run_suites(&all, &["ev-duality"], secs(5), false))),
        ("• associativity, basis triples of degree ≤ 3 and 100 seeded triples, < 30 s", Box::new(|| run_suites(&all, &["bullet"], secs(30), false))),
        ("action for basis v, w of degree ≤ 2 in all modules, < 30 s", Box::new(|| run_suites(&all, &["action"], secs(30), false))),
        ("crossing map suite up to degree 3, < 60 s", Box::new(|| run_suites(&all, &["theta"], secs(60), false))),
        ("centre suite and ∇(v•a) = ∇(v)•a, < 30 s", Box::new(|| run_suites(&all, &["centre"], secs(30), false))),
        ("Hopf ℤ₂ and S₃, < 5 s", Box::new(|| run_suites(&all[..1], &["hopf"], secs(5), false))),
        ("Sobolev Gram PSD, increments PSD, definite under uniform, < 5 s", Box::new(sobolev_two_point)),
        ("five fault injections caught with witnesses", Box::new(fault_injection)),
        ("byte-identical verify --json report bodies for one seed", Box::new(deterministic_reports)),
    ];
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {label} ({:.2} s)", i + 1, o.elapsed.as_secs_f64());
        for n in &o.notes {
            println!("        {n}");
        }
        if !o.ok {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
