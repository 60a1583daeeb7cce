//! Finite-dimensional star algebras given by structure constants, and states on them.

use crate::error::{Error, Result};
use crate::linalg::{self, ldl_certify_psd, Mat, PsdViolation, Vector};
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug)]
pub struct Algebra {
    pub field: Field,
    pub names: Vec<String>,
    /// `structure[i][j]` holds the coordinates of `e_i·e_j`.
    structure: Vec<Vec<Vector>>,
    unit: Vector,
    /// Conjugate-linear star: `x* = S·conj(x)`.
    star: Option<Mat>,
    left: Vec<Mat>,
    right: Vec<Mat>,
}

impl Algebra {
    /// Assembles an algebra without checking any axiom; see [`Algebra::validate`].
    pub fn new(field: Field, names: Vec<String>, structure: Vec<Vec<Vector>>, unit: Vector, star: Option<Mat>) -> Algebra {
        let n = names.len();
        let left = (0..n)
            .map(|i| Mat::from_fn_cols(n, n, |j| structure[i][j].clone()))
            .collect();
        let right = (0..n)
            .map(|i| Mat::from_fn_cols(n, n, |j| structure[j][i].clone()))
            .collect();
        Algebra { field, names, structure, unit, star, left, right }
    }

    /// Functions on a finite set with pointwise product and the identity star.
    pub fn functions(points: &[String]) -> Algebra {
        let n = points.len();
        let structure = (0..n)
            .map(|i| (0..n).map(|j| if i == j { linalg::unit(n, i) } else { linalg::zeros(n) }).collect())
            .collect();
        let unit = vec![Scalar::ONE; n];
        Algebra::new(Field::Rational, points.to_vec(), structure, unit, Some(Mat::identity(n)))
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn structure(&self) -> &Vec<Vec<Vector>> {
        &self.structure
    }

    pub fn star_matrix(&self) -> Option<&Mat> {
        self.star.as_ref()
    }

    pub fn basis(&self, i: usize) -> Vector {
        linalg::unit(self.dim(), i)
    }

    /// Matrix of `x ↦ e_i·x`.
    pub fn left_basis(&self, i: usize) -> &Mat {
        &self.left[i]
    }

    /// Matrix of `x ↦ x·e_i`.
    pub fn right_basis(&self, i: usize) -> &Mat {
        &self.right[i]
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = linalg::zeros(self.dim());
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let c = a * b;
                linalg::axpy(&mut out, &c, &self.structure[i][j]);
            }
        }
        out
    }

    pub fn star(&self, x: &[Scalar]) -> Option<Vector> {
        self.star.as_ref().map(|s| s.mul_vec(&linalg::conj(x)))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for row in &self.structure {
            for v in row {
                if let Some(bad) = v.iter().find(|x| !x.in_field(self.field)) {
                    return Err(Error::validation("field", format!("structure constant {bad} outside the field")));
                }
            }
        }
        for i in 0..n {
            let e = self.basis(i);
            if self.mul(&self.unit, &e) != e || self.mul(&e, &self.unit) != e {
                return Err(Error::validation("unit", format!("1·{0} or {0}·1 differs from {0}", self.names[i])));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.structure[i][j];
                for k in 0..n {
                    let lhs = self.mul(ij, &self.basis(k));
                    let rhs = self.mul(&self.basis(i), &self.structure[j][k]);
                    if lhs != rhs {
                        return Err(Error::validation(
                            "associativity",
                            format!("({}·{})·{} != {}·({}·{})", self.names[i], self.names[j], self.names[k], self.names[i], self.names[j], self.names[k]),
                        ));
                    }
                }
            }
        }
        if let Some(s) = &self.star {
            if s.rows() != n || s.cols() != n {
                return Err(Error::validation("star", "star matrix has the wrong shape"));
            }
            if s.mul(&conj_entries(s)) != Mat::identity(n) {
                return Err(Error::validation("star", "star is not an involution"));
            }
            if self.star(&self.unit).as_ref() != Some(&self.unit) {
                return Err(Error::validation("star", "1* != 1"));
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = self.star(&self.structure[i][j]).unwrap();
                    let rhs = self.mul(&self.star(&self.basis(j)).unwrap(), &self.star(&self.basis(i)).unwrap());
                    if lhs != rhs {
                        return Err(Error::validation("star", format!("({}·{})* != {}*·{}*", self.names[i], self.names[j], self.names[j], self.names[i])));
                    }
                }
            }
        }
        Ok(())
    }
}

fn conj_entries(m: &Mat) -> Mat {
    Mat::from_rows(m.to_rows().iter().map(|r| linalg::conj(r)).collect(), m.cols())
}

/// A linear functional on a star algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub functional: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateReport {
    pub faithful: bool,
}

impl State {
    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        let mut s = Scalar::ZERO;
        for (a, b) in self.functional.iter().zip(x) {
            s.add_mul(a, b);
        }
        s
    }

    /// Uniform average of point evaluations on a function algebra.
    pub fn uniform(name: &str, n: usize) -> State {
        State { name: name.to_string(), functional: vec![Scalar::ratio(1, n as i64); n] }
    }

    /// Gram matrix `G[i][j] = φ(e_i*·e_j)`, so that `φ(x*x) = xᴴ·G·x`.
    pub fn gram(&self, alg: &Algebra) -> Result<Mat> {
        let n = alg.dim();
        if alg.star_matrix().is_none() {
            return Err(Error::validation("state", "algebra has no star"));
        }
        let stars: Vec<Vector> = (0..n).map(|i| alg.star(&alg.basis(i)).unwrap()).collect();
        let mut g = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, self.eval(&alg.mul(&stars[i], &alg.basis(j))));
            }
        }
        Ok(g)
    }

    /// Checks normalisation and positivity; reports faithfulness.
    pub fn validate(&self, alg: &Algebra) -> Result<StateReport> {
        if self.functional.len() != alg.dim() {
            return Err(Error::validation("state-shape", format!("state `{}` has the wrong length", self.name)));
        }
        if self.eval(alg.unit()) != Scalar::ONE {
            return Err(Error::validation("state-normalised", format!("state `{}` has φ(1) = {}", self.name, self.eval(alg.unit()))));
        }
        match ldl_certify_psd(&self.gram(alg)?) {
            Ok(cert) => Ok(StateReport { faithful: cert.is_strictly_positive() }),
            Err(PsdViolation::Negative { vector, value }) => Err(Error::validation(
                "state-positive",
                format!("state `{}`: φ(x*x) = {} for x = {}", self.name, value, linalg::fmt_vector(&vector)),
            )),
            Err(PsdViolation::NotHermitian { row, col }) => Err(Error::validation(
                "state-positive",
                format!("state `{}` is not hermitian at ({}, {})", self.name, alg.names[row], alg.names[col]),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    /// 2×2 matrices over ℚ(i) with the conjugate-transpose star, basis E11, E12, E21, E22.
    fn matrices() -> Algebra {
        let idx = |r: usize, c: usize| 2 * r + c;
        let mut structure = vec![vec![linalg::zeros(4); 4]; 4];
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for (c, d) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                if b == c {
                    structure[idx(a, b)][idx(c, d)] = linalg::unit(4, idx(a, d));
                }
            }
        }
        let mut star = Mat::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            star.set(idx(c, r), idx(r, c), Scalar::ONE);
        }
        let unit = vec![Scalar::ONE, Scalar::ZERO, Scalar::ZERO, Scalar::ONE];
        Algebra::new(Field::Gaussian, ["E11", "E12", "E21", "E22"].map(String::from).to_vec(), structure, unit, Some(star))
    }

    #[test]
    fn function_algebra_validates() {
        let a = Algebra::functions(&points(3));
        a.validate().unwrap();
        let s = State::uniform("uniform", 3);
        assert!(s.validate(&a).unwrap().faithful);
        let ev0 = State { name: "ev0".into(), functional: vec![Scalar::ONE, Scalar::ZERO, Scalar::ZERO] };
        assert!(!ev0.validate(&a).unwrap().faithful);
    }

    #[test]
    fn matrix_algebra_validates() {
        let m = matrices();
        m.validate().unwrap();
        let tr = State { name: "tr/2".into(), functional: vec![Scalar::ratio(1, 2), Scalar::ZERO, Scalar::ZERO, Scalar::ratio(1, 2)] };
        assert!(tr.validate(&m).unwrap().faithful);
        let x: Vector = vec![Scalar::ONE, Scalar::i(), Scalar::ZERO, Scalar::ZERO];
        let xs = m.star(&x).unwrap();
        assert_eq!(xs, vec![Scalar::ONE, Scalar::ZERO, -Scalar::i(), Scalar::ZERO]);
    }

    #[test]
    fn broken_associativity_is_reported() {
        let a = Algebra::functions(&points(2));
        let mut structure = a.structure().clone();
        structure[0][1] = linalg::unit(2, 1);
        let bad = Algebra::new(Field::Rational, points(2), structure, a.unit().clone(), None);
        let err = bad.validate().unwrap_err();
        assert!(matches!(err, Error::Validation { ref check, .. } if check == "associativity" || check == "unit"), "{err}");
    }

    #[test]
    fn non_positive_state_is_reported() {
        let a = Algebra::functions(&points(2));
        let s = State { name: "bad".into(), functional: vec![Scalar::from_int(2), Scalar::from_int(-1)] };
        let err = s.validate(&a).unwrap_err();
        assert!(matches!(err, Error::Validation { ref check, .. } if check == "state-positive"), "{err}");
    }
}
