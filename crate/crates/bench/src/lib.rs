//! Fixtures shared by the benchmarks.

use ncdiff::apply::parse_operator;
use ncdiff::{builtins, Geometry, GradedOperator};

pub fn geometry(name: &str, degree: Option<usize>) -> Geometry {
    let b = builtins::builtin(name).expect("a builtin bundle");
    Geometry::from_bundle(&b, degree).expect("builtins load")
}

/// A fixed operator with a component in every degree up to `degree`.
pub fn dense_operator(g: &Geometry, degree: usize, twist: i64) -> GradedOperator {
    let names = &g.dual.names;
    let mut terms = vec![format!("{twist}")];
    for n in 1..=degree {
        let word: Vec<&str> = (0..n).map(|k| names[(k * 3 + twist as usize) % names.len()].as_str()).collect();
        terms.push(format!("{}/{} * {}", n as i64 + twist, n + 1, word.join("⊗")));
        terms.push(names[(n + twist as usize) % names.len()].clone());
    }
    parse_operator(g, &terms.join(" + ")).expect("fixture parses")
}
