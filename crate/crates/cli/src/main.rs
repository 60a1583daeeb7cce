use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncdiff::linalg::fmt_vector;
use ncdiff::verify::{self, Options};
use ncdiff::{Bundle, Error, Geometry};

/// Exact verification of noncommutative differential operators on a bundle.
///
/// A bundle is a JSON file, or `builtin:<name>` for one of the built-in examples
/// (two-point-universal, z3-universal, degenerate).
#[derive(Parser)]
#[command(name = "ncdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a bundle, then summarise it.
    Validate { bundle: String },
    /// Run verification suites and print the report.
    Verify {
        bundle: String,
        /// Comma-separated suite names; all suites by default.
        #[arg(long, value_delimiter = ',')]
        suites: Vec<String>,
        /// Truncation degree, overriding the bundle's.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Apply an operator expression to a module element, e.g. `apply B A "f01⊗f10" "1,0"`.
    Apply {
        bundle: String,
        module: String,
        expr: String,
        element: String,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Sobolev Gram matrix of order n with its positivity certificate.
    Gram {
        bundle: String,
        module: String,
        state: String,
        n: usize,
        #[arg(long)]
        json: bool,
    },
}

const PASS: u8 = 0;
const CHECK_FAILED: u8 = 1;
const INPUT_ERROR: u8 = 2;

fn input_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(INPUT_ERROR)
}

fn load(source: &str, degree: Option<usize>) -> Result<(Bundle, Geometry), Error> {
    let b = Bundle::load(source)?;
    let g = Geometry::from_bundle(&b, degree)?;
    Ok((b, g))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { bundle } => validate(&bundle),
        Command::Verify { bundle, suites, degree, seed, json } => {
            let (b, g) = match load(&bundle, degree) {
                Ok(x) => x,
                Err(e) => return input_error(&e),
            };
            // Panics inside checks are recorded as failures with their message.
            std::panic::set_hook(Box::new(|_| {}));
            let (report, timing) = match verify::verify_all(&b, &g, &Options { suites, seed }) {
                Ok(x) => x,
                Err(e) => return input_error(&e),
            };
            if json {
                println!("{}", report.to_json(&timing));
            } else {
                print!("{}", report.to_text(&timing));
            }
            ExitCode::from(if report.passed { PASS } else { CHECK_FAILED })
        }
        Command::Apply { bundle, module, expr, element, degree, json } => {
            let app = match load(&bundle, degree).and_then(|(_, g)| g.apply_operator(&module, &expr, &element)) {
                Ok(a) => a,
                Err(e) => return input_error(&e),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&app).expect("serialisable"));
            } else {
                println!("module {}, e = {}", app.module, fmt_vector(&app.element));
                for s in &app.trace {
                    println!("∇^{} e = {}", s.order, fmt_vector(&s.nabla));
                    println!("  degree-{} part ▷ e = {}", s.order, fmt_vector(&s.contribution));
                }
                println!("result {}", fmt_vector(&app.result));
            }
            ExitCode::from(PASS)
        }
        Command::Gram { bundle, module, state, n, json } => {
            let g = match load(&bundle, None) {
                Ok((_, g)) => g,
                Err(e) => return input_error(&e),
            };
            match g.sobolev_gram(&module, &state, n) {
                Ok(s) if json => {
                    println!("{}", serde_json::to_string_pretty(&s).expect("serialisable"));
                    ExitCode::from(PASS)
                }
                Ok(s) => {
                    println!("W^{{{n},2}} Gram matrix of {module} under {state}:");
                    for r in s.gram.to_rows() {
                        println!("  {}", fmt_vector(&r));
                    }
                    println!("LDL pivots {}", s.pivots.join(", "));
                    println!("{}", if s.strictly_positive { "positive definite" } else { "positive semidefinite, singular" });
                    ExitCode::from(PASS)
                }
                Err(e @ Error::PositivityFailure(_)) => {
                    eprintln!("{e}");
                    ExitCode::from(CHECK_FAILED)
                }
                Err(e) => input_error(&e),
            }
        }
    }
}

fn validate(source: &str) -> ExitCode {
    let b = match Bundle::load(source) {
        Ok(b) => b,
        Err(e) => return input_error(&e),
    };
    let g = match Geometry::from_bundle(&b, None) {
        Ok(g) => g,
        Err(e) => {
            println!("INVALID {}: {e}", b.name);
            return ExitCode::from(CHECK_FAILED);
        }
    };
    println!("valid bundle {} (sha256 {})", b.name, b.digest());
    println!("field {:?}, degree {}", g.field, g.degree);
    println!("dim A = {}, dim Ω¹ = {}, dim Vec = {}", g.algebra().dim(), g.dim(&[g.omega]), g.dim(&[g.vec]));
    for m in &g.modules {
        println!("module {} (dim {}{})", m.name, m.dim(&g), if m.sigma.is_some() { ", bimodule connection" } else { "" });
    }
    for s in &g.states {
        let faithful = s.validate(g.algebra()).map(|r| r.faithful).unwrap_or(false);
        println!("state {}{}", s.name, if faithful { " (faithful)" } else { "" });
    }
    for ip in &g.inner_products {
        println!("inner product on {}", ip.module);
    }
    ExitCode::from(PASS)
}
