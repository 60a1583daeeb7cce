//! Operator expressions and their action on module elements.
//!
//! An expression is a sum of terms `c * a * v₁ ⊗ … ⊗ vₙ` where `c` is a rational
//! coefficient, `a` an optional algebra basis name acting on the left and the `vᵢ`
//! vector-field basis names. `*` and `⊗` both concatenate; `1` is the unit.
//! Example: `2*f01 - 1/2 * δ0*f01⊗f10 + 1`.

use serde::Serialize;

use crate::diffop::GradedOperator;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::linalg::{self, Vector};
use crate::scalar::{Rat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Plus,
    Minus,
    Times,
    Number(Rat),
    Name(String),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            _ if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' | '−' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' | '⊗' | '·' => {
                chars.next();
                out.push(Token::Times);
            }
            '0'..='9' => {
                let mut num = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '/' {
                        num.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Number(num.parse().map_err(|e| Error::Parse(format!("coefficient `{num}`: {e}")))?));
            }
            _ => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || matches!(d, '+' | '-' | '−' | '*' | '⊗' | '·') {
                        break;
                    }
                    name.push(d);
                    chars.next();
                }
                out.push(Token::Name(name));
            }
        }
    }
    Ok(out)
}

/// One term `c · a · v₁⊗…⊗vₙ`, with `a` an algebra basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Term {
    coefficient: Scalar,
    algebra: Option<usize>,
    fields: Vec<usize>,
}

fn parse_terms(g: &Geometry, expr: &str) -> Result<Vec<Term>> {
    let tokens = tokenize(expr)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty operator expression".into()));
    }
    let alg = g.algebra();
    let mut terms = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut coefficient = Scalar::ONE;
        while let Some(t @ (Token::Plus | Token::Minus)) = tokens.get(i) {
            if *t == Token::Minus {
                coefficient = -coefficient;
            }
            i += 1;
        }
        let mut term = Term { coefficient, algebra: None, fields: Vec::new() };
        let mut expect_factor = true;
        while let Some(t) = tokens.get(i) {
            match (t, expect_factor) {
                (Token::Times, false) => expect_factor = true,
                (Token::Number(r), true) => {
                    term.coefficient = &term.coefficient * &Scalar::from_rat(r.clone());
                    expect_factor = false;
                }
                (Token::Name(n), true) => {
                    if let Some(k) = g.dual.names.iter().position(|x| x == n) {
                        term.fields.push(k);
                    } else if let Some(k) = alg.names.iter().position(|x| x == n) {
                        if !term.fields.is_empty() || term.algebra.is_some() {
                            return Err(Error::Parse(format!("algebra element `{n}` must come before the vector fields of its term")));
                        }
                        term.algebra = Some(k);
                    } else {
                        return Err(Error::UnknownName(n.clone()));
                    }
                    expect_factor = false;
                }
                (Token::Plus | Token::Minus, false) => break,
                _ => return Err(Error::Parse(format!("unexpected token {t:?} in `{expr}`"))),
            }
            i += 1;
        }
        if expect_factor {
            return Err(Error::Parse(format!("`{expr}` ends in an operator")));
        }
        terms.push(term);
    }
    Ok(terms)
}

/// Parses an operator expression into an element of the truncated tensor algebra.
pub fn parse_operator(g: &Geometry, expr: &str) -> Result<GradedOperator> {
    let sp = &g.spaces;
    let alg = g.algebra();
    let mut x = GradedOperator::zero(g);
    for t in parse_terms(g, expr)? {
        let n = t.fields.len();
        if n > g.degree {
            return Err(Error::DegreeExceeded { requested: n, limit: g.degree });
        }
        let dv = g.dim(&[g.vec]);
        let mut v = alg.unit().clone();
        for (k, &f) in t.fields.iter().enumerate() {
            v = sp.tensor(&g.vec_n(k), &v, &[g.vec], &linalg::unit(dv, f));
        }
        if let Some(a) = t.algebra {
            v = sp.left_act(&g.vec_n(n), &alg.basis(a), &v);
        }
        linalg::axpy(&mut x.components[n], &t.coefficient, &v);
    }
    Ok(x)
}

/// Parses `[1/2, 0]`, `1/2, 0` or `["1/2", "0"]` as coordinates of a module element.
pub fn parse_element(s: &str, dim: usize) -> Result<Vector> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').collect() };
    let v = parts
        .iter()
        .map(|p| p.trim().trim_matches('"').parse::<Scalar>().map_err(|e| Error::Parse(format!("coordinate `{}`: {e}", p.trim()))))
        .collect::<Result<Vector>>()?;
    if v.len() != dim {
        return Err(Error::Parse(format!("element has {} coordinates, the module has dimension {dim}", v.len())));
    }
    Ok(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub order: usize,
    /// Coordinates of `∇⁽ⁿ⁾e` in `Ω^{⊗n} ⊗_A E`.
    pub nabla: Vector,
    /// `vₙ ▷ e` for the degree-`n` component `vₙ` of the operator.
    pub contribution: Vector,
}

#[derive(Clone, Debug, Serialize)]
pub struct Application {
    pub module: String,
    pub operator: GradedOperator,
    pub element: Vector,
    pub result: Vector,
    pub trace: Vec<TraceStep>,
}

impl Geometry {
    /// `x ▷ e` for a parsed expression, with the iterated covariant derivatives used.
    pub fn apply_operator(&self, module: &str, expr: &str, element: &str) -> Result<Application> {
        let m = self.module(module)?;
        let x = parse_operator(self, expr)?;
        let e = parse_element(element, m.dim(self))?;
        let top = x.degree().unwrap_or(0);
        let trace = (0..=top)
            .map(|n| TraceStep {
                order: n,
                nabla: self.iterate_nabla(&m, n).mul_vec(&e),
                contribution: self.act_homogeneous(&m, n, &x.components[n], &e),
            })
            .collect();
        let result = self.act(&m, &x, &e);
        Ok(Application { module: m.name.clone(), operator: x, element: e, result, trace })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn two_point() -> Geometry {
        Geometry::from_bundle(&builtins::two_point(), None).unwrap()
    }

    #[test]
    fn tokens() {
        let t = tokenize("2/3*f01 ⊗ f10 − δ0").unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(t[0], Token::Number(Rat::new(2, 3)));
        assert_eq!(t[5], Token::Minus);
    }

    #[test]
    fn unit_acts_trivially() {
        let g = two_point();
        for name in ["A", "Ω¹", "L"] {
            let dim = g.module(name).unwrap().dim(&g);
            let e: Vec<String> = (0..dim).map(|i| format!("{}/{}", i + 1, i + 2)).collect();
            let a = g.apply_operator(name, "1", &e.join(",")).unwrap();
            assert_eq!(a.result, a.element);
        }
    }

    #[test]
    fn unknown_names_and_degrees_are_rejected() {
        let g = two_point();
        assert!(matches!(parse_operator(&g, "f01*g"), Err(Error::UnknownName(_))));
        assert!(matches!(parse_operator(&g, "f01⊗f10⊗f01⊗f10"), Err(Error::DegreeExceeded { requested: 4, limit: 3 })));
        assert!(matches!(parse_operator(&g, "f01 +"), Err(Error::Parse(_))));
        assert!(matches!(parse_operator(&g, "f01 δ0"), Err(Error::Parse(_))));
    }

    #[test]
    fn sums_are_linear() {
        let g = two_point();
        let a = parse_operator(&g, "2*f01 - f10 + 1/2*f01*f10").unwrap();
        let b = parse_operator(&g, "f01").unwrap();
        let c = parse_operator(&g, "f10").unwrap();
        let d = parse_operator(&g, "f01⊗f10").unwrap();
        let expect: Vec<Vector> = (0..=g.degree)
            .map(|n| {
                let mut v = linalg::scale(&Scalar::from_int(2), &b.components[n]);
                v = linalg::sub(&v, &c.components[n]);
                linalg::add(&v, &linalg::scale(&Scalar::ratio(1, 2), &d.components[n]))
            })
            .collect();
        assert_eq!(a.components, expect);
    }

    #[test]
    fn elements_parse() {
        assert_eq!(parse_element("[1/2, \"0\"]", 2).unwrap(), vec![Scalar::ratio(1, 2), Scalar::ZERO]);
        assert!(parse_element("1", 2).is_err());
    }
}
