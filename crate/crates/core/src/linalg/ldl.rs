use super::mat::{hdot, unit, Mat, Vector};
use crate::scalar::{Rat, Scalar};

/// `g = L·diag(d)·Lᴴ` with `L` unit lower triangular and every `d_k ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdlCertificate {
    pub l: Mat,
    pub d: Vec<Rat>,
}

impl LdlCertificate {
    pub fn is_strictly_positive(&self) -> bool {
        self.d.iter().all(|x| x.signum() > 0)
    }

    pub fn reconstruct(&self) -> Mat {
        let n = self.d.len();
        let mut dm = Mat::zeros(n, n);
        for (i, x) in self.d.iter().enumerate() {
            dm.set(i, i, Scalar::from_rat(x.clone()));
        }
        self.l.mul(&dm).mul(&self.l.conj_transpose())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdViolation {
    NotHermitian { row: usize, col: usize },
    /// `vᴴ·g·v = value < 0`.
    Negative { vector: Vector, value: Rat },
}

/// `vᴴ·g·v`.
pub fn quadratic_form(g: &Mat, v: &[Scalar]) -> Scalar {
    hdot(v, &g.mul_vec(v))
}

/// Certifies that a Hermitian matrix is positive semidefinite, or returns a vector on
/// which the quadratic form is negative.
pub fn ldl_certify_psd(g: &Mat) -> Result<LdlCertificate, PsdViolation> {
    assert!(g.is_square(), "ldl_certify_psd needs a square matrix");
    let n = g.rows();
    for i in 0..n {
        for j in i..n {
            if *g.get(i, j) != g.get(j, i).conj() {
                return Err(PsdViolation::NotHermitian { row: i, col: j });
            }
        }
    }
    let mut w = g.clone();
    // Row operations applied so far: w = t·g·tᴴ.
    let mut t = Mat::identity(n);
    let mut l = Mat::identity(n);
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = w.get(k, k).re.clone();
        match pivot.signum() {
            -1 => return Err(witness(g, &t, unit(n, k))),
            0 => {
                if let Some(j) = (k + 1..n).find(|&j| !w.get(k, j).is_zero()) {
                    let c = w.get(k, j).clone();
                    let wjj = w.get(j, j).re.clone();
                    let s = &(&wjj.abs() + &Rat::ONE) * &c.norm_sqr().recip();
                    let mut y = unit(n, j);
                    y[k] = -(&Scalar::from_rat(s) * &c);
                    return Err(witness(g, &t, y));
                }
                d.push(Rat::ZERO);
            }
            _ => {
                let inv = Scalar::from_rat(pivot.recip());
                for j in k + 1..n {
                    let f = w.get(j, k) * &inv;
                    if f.is_zero() {
                        continue;
                    }
                    l.set(j, k, f.clone());
                    for c in 0..n {
                        let x = w.get(k, c).clone();
                        if !x.is_zero() {
                            *w.at_mut(j, c) -= &(&f * &x);
                        }
                        let y = t.get(k, c).clone();
                        if !y.is_zero() {
                            *t.at_mut(j, c) -= &(&f * &y);
                        }
                    }
                    let fc = f.conj();
                    for r in 0..n {
                        let x = w.get(r, k).clone();
                        if !x.is_zero() {
                            *w.at_mut(r, j) -= &(&x * &fc);
                        }
                    }
                }
                d.push(pivot);
            }
        }
    }
    Ok(LdlCertificate { l, d })
}

fn witness(g: &Mat, t: &Mat, y: Vector) -> PsdViolation {
    let vector = t.conj_transpose().mul_vec(&y);
    let value = quadratic_form(g, &vector).re;
    debug_assert!(value.signum() < 0);
    PsdViolation::Negative { vector, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Mat {
        let cols = rows[0].len();
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(), cols)
    }

    #[test]
    fn identity_is_strictly_positive() {
        let c = ldl_certify_psd(&Mat::identity(3)).unwrap();
        assert!(c.is_strictly_positive());
        assert_eq!(c.reconstruct(), Mat::identity(3));
    }

    #[test]
    fn indefinite_two_by_two() {
        let g = m(&[&[1, 2], &[2, 1]]);
        // Oracle: the form evaluated directly at (1, -1) is 1 - 2 - 2 + 1.
        assert_eq!(quadratic_form(&g, &[Scalar::ONE, -Scalar::ONE]), Scalar::from_int(-2));
        match ldl_certify_psd(&g) {
            Err(PsdViolation::Negative { vector, value }) => {
                assert_eq!(Scalar::from_rat(value.clone()), quadratic_form(&g, &vector));
                assert!(value.signum() < 0);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn zero_pivot_with_coupling() {
        let g = m(&[&[0, 1], &[1, 0]]);
        let Err(PsdViolation::Negative { value, .. }) = ldl_certify_psd(&g) else { panic!() };
        assert!(value.signum() < 0);
        let c = ldl_certify_psd(&m(&[&[0, 0], &[0, 3]])).unwrap();
        assert!(!c.is_strictly_positive());
    }

    #[test]
    fn hermitian_gaussian() {
        let a: Scalar = "1+1 i".parse().unwrap();
        let g = Mat::from_rows(
            vec![vec![Scalar::from_int(2), a.clone()], vec![a.conj(), Scalar::from_int(2)]],
            2,
        );
        let c = ldl_certify_psd(&g).unwrap();
        assert!(c.is_strictly_positive());
        assert_eq!(c.reconstruct(), g);
        let bad = Mat::from_rows(vec![vec![Scalar::ONE, a.clone()], vec![a, Scalar::ONE]], 2);
        assert_eq!(ldl_certify_psd(&bad), Err(PsdViolation::NotHermitian { row: 0, col: 1 }));
    }

    proptest! {
        #[test]
        fn gram_matrices_are_certified(entries in proptest::collection::vec(-3i64..4, 12)) {
            // b·bᵀ is PSD for any 3×4 b; the certificate must reconstruct it.
            let b = Mat::from_rows(entries.chunks(4).map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(), 4);
            let g = b.mul(&b.transpose());
            let c = ldl_certify_psd(&g).unwrap();
            prop_assert_eq!(c.reconstruct(), g);
        }

        #[test]
        fn witnesses_are_negative(entries in proptest::collection::vec(-3i64..4, 6)) {
            let g = Mat::from_rows(vec![
                vec![entries[0].into(), entries[1].into(), entries[2].into()],
                vec![entries[1].into(), entries[3].into(), entries[4].into()],
                vec![entries[2].into(), entries[4].into(), entries[5].into()],
            ], 3);
            match ldl_certify_psd(&g) {
                Ok(c) => prop_assert_eq!(c.reconstruct(), g),
                Err(PsdViolation::Negative { vector, value }) => {
                    prop_assert!(value.signum() < 0);
                    prop_assert_eq!(quadratic_form(&g, &vector), Scalar::from_rat(value));
                }
                Err(e) => prop_assert!(false, "{:?}", e),
            }
        }
    }
}
