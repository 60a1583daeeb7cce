use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::scalar::Scalar;

/// Index of a bimodule registered in a [`crate::tensor::Spaces`] registry.
pub type AtomId = usize;

/// A finite-dimensional `A`-bimodule given by action matrices on a `K`-basis.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub name: String,
    pub dim: usize,
    /// `left[i]` is the matrix of `e ↦ a_i·e`.
    pub left: Vec<Mat>,
    /// `right[i]` is the matrix of `e ↦ e·a_i`.
    pub right: Vec<Mat>,
    /// Atoms of a frozen tensor product; `None` for a primitive bimodule.
    pub parts: Option<Vec<AtomId>>,
}

impl Bimodule {
    pub fn new(name: &str, left: Vec<Mat>, right: Vec<Mat>) -> Bimodule {
        let dim = left.first().map_or(0, Mat::rows);
        Bimodule { name: name.to_string(), dim, left, right, parts: None }
    }

    /// The algebra acting on itself.
    pub fn regular(alg: &Algebra) -> Bimodule {
        let n = alg.dim();
        Bimodule::new(
            "A",
            (0..n).map(|i| alg.left_basis(i).clone()).collect(),
            (0..n).map(|i| alg.right_basis(i).clone()).collect(),
        )
    }

    pub fn left_matrix(&self, a: &[Scalar]) -> Mat {
        combine(&self.left, a, self.dim)
    }

    pub fn right_matrix(&self, a: &[Scalar]) -> Mat {
        combine(&self.right, a, self.dim)
    }

    pub fn left_act(&self, a: &[Scalar], v: &[Scalar]) -> Vector {
        act(&self.left, a, v)
    }

    pub fn right_act(&self, v: &[Scalar], a: &[Scalar]) -> Vector {
        act(&self.right, a, v)
    }

    /// Unital, associative, commuting actions.
    pub fn validate(&self, alg: &Algebra) -> Result<()> {
        let n = alg.dim();
        let fail = |what: String| Err(Error::validation("bimodule", format!("{}: {}", self.name, what)));
        if self.left.len() != n || self.right.len() != n {
            return fail("one action matrix per algebra basis element is required".into());
        }
        for m in self.left.iter().chain(&self.right) {
            if m.rows() != self.dim || m.cols() != self.dim {
                return fail("action matrix has the wrong shape".into());
            }
            if let Some(bad) = (0..m.rows()).flat_map(|i| m.row(i).iter()).find(|x| !x.in_field(alg.field)) {
                return fail(format!("entry {bad} lies outside the field"));
            }
        }
        let id = Mat::identity(self.dim);
        if self.left_matrix(alg.unit()) != id || self.right_matrix(alg.unit()) != id {
            return fail("the unit does not act as the identity".into());
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &alg.structure()[i][j];
                if self.left[i].mul(&self.left[j]) != self.left_matrix(ij) {
                    return fail(format!("left action not associative at ({}, {})", alg.names[i], alg.names[j]));
                }
                if self.right[j].mul(&self.right[i]) != self.right_matrix(ij) {
                    return fail(format!("right action not associative at ({}, {})", alg.names[i], alg.names[j]));
                }
                if self.left[i].mul(&self.right[j]) != self.right[j].mul(&self.left[i]) {
                    return fail(format!("actions of {} and {} do not commute", alg.names[i], alg.names[j]));
                }
            }
        }
        Ok(())
    }

    /// The conjugate bimodule: `a·ē = (e·a*)‾` and `ē·a = (a*·e)‾`, on the conjugate basis.
    pub fn conjugate(&self, alg: &Algebra) -> Result<Bimodule> {
        let Some(s) = alg.star_matrix() else {
            return Err(Error::validation("star", "conjugate module needs a star algebra"));
        };
        let n = alg.dim();
        let bar = |side: &Vec<Mat>| -> Vec<Mat> {
            (0..n)
                .map(|i| {
                    let m = combine(side, &s.col(i), self.dim);
                    Mat::from_rows(m.to_rows().iter().map(|r| linalg::conj(r)).collect(), self.dim)
                })
                .collect()
        };
        Ok(Bimodule {
            name: format!("conj({})", self.name),
            dim: self.dim,
            left: bar(&self.right),
            right: bar(&self.left),
            parts: None,
        })
    }
}

fn combine(mats: &[Mat], a: &[Scalar], dim: usize) -> Mat {
    let mut out = Mat::zeros(dim, dim);
    for (m, c) in mats.iter().zip(a) {
        if !c.is_zero() {
            out = out.add(&m.scale(c));
        }
    }
    out
}

fn act(mats: &[Mat], a: &[Scalar], v: &[Scalar]) -> Vector {
    let mut out = linalg::zeros(v.len());
    for (m, c) in mats.iter().zip(a) {
        if !c.is_zero() {
            linalg::axpy(&mut out, c, &m.mul_vec(v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn gaussian_functions() -> Algebra {
        // ℂ-valued functions on two points with pointwise conjugation as star.
        let a = Algebra::functions(&["p".into(), "q".into()]);
        Algebra::new(Field::Gaussian, a.names.clone(), a.structure().clone(), a.unit().clone(), Some(Mat::identity(2)))
    }

    #[test]
    fn regular_bimodule_validates() {
        let a = gaussian_functions();
        Bimodule::regular(&a).validate(&a).unwrap();
    }

    #[test]
    fn conjugate_swaps_sides_and_is_involutive() {
        let a = gaussian_functions();
        // A bimodule with different left and right supports: K with p acting on the left and q on the right.
        let left = vec![Mat::identity(1), Mat::zeros(1, 1)];
        let right = vec![Mat::zeros(1, 1), Mat::identity(1)];
        let e = Bimodule::new("E", left.clone(), right.clone());
        e.validate(&a).unwrap();
        let eb = e.conjugate(&a).unwrap();
        eb.validate(&a).unwrap();
        assert_eq!(eb.left, right);
        assert_eq!(eb.right, left);
        let ebb = eb.conjugate(&a).unwrap();
        assert_eq!((ebb.left, ebb.right), (left, right));
    }

    #[test]
    fn broken_action_is_reported() {
        let a = gaussian_functions();
        let mut m = Bimodule::regular(&a);
        m.right[0] = Mat::identity(2);
        assert!(m.validate(&a).is_err());
    }
}
