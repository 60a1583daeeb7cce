use super::mat::{Mat, Vector};
use crate::scalar::Scalar;

/// Sparse vector as sorted `(index, value)` pairs with nonzero values.
pub type SparseVec = Vec<(usize, Scalar)>;

pub fn sparse_from_dense(v: &[Scalar]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// `a - c·b` for sparse `a`, `b`.
fn sparse_sub_scaled(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map_or(usize::MAX, |e| e.0);
        let kb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ka < kb {
            out.push(a[i].clone());
            i += 1;
        } else if kb < ka {
            out.push((kb, -(c * &b[j].1)));
            j += 1;
        } else {
            let x = &a[i].1 - &(c * &b[j].1);
            if !x.is_zero() {
                out.push((ka, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn sparse_get(v: &SparseVec, k: usize) -> Option<&Scalar> {
    v.binary_search_by_key(&k, |e| e.0).ok().map(|p| &v[p].1)
}

/// Incremental sparse reduced row echelon form.
///
/// Every row is normalised at its leading column and that column is cleared
/// from all other rows, so the final state is the unique RREF of the span.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    ambient: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<usize>>,
}

impl SparseEchelon {
    pub fn new(ambient: usize) -> SparseEchelon {
        SparseEchelon { ambient, rows: Vec::new(), pivot_row: vec![None; ambient] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut w = v.clone();
        let hits: Vec<(usize, Scalar)> =
            v.iter().filter_map(|(k, x)| self.pivot_row[*k].map(|r| (r, x.clone()))).collect();
        for (r, _) in hits {
            let p = self.rows[r][0].0;
            if let Some(c) = sparse_get(&w, p).cloned() {
                w = sparse_sub_scaled(&w, &c, &self.rows[r]);
            }
        }
        w
    }

    /// Adds a vector to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let w = self.reduce(v);
        let Some((lead, c)) = w.first().cloned() else {
            return false;
        };
        let inv = c.inv();
        let w: SparseVec = w.into_iter().map(|(k, x)| (k, &x * &inv)).collect();
        for row in &mut self.rows {
            if let Some(f) = sparse_get(row, lead).cloned() {
                *row = sparse_sub_scaled(row, &f, &w);
            }
        }
        self.pivot_row[lead] = Some(self.rows.len());
        self.rows.push(w);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Finishes into the quotient `K^n / span`.
    pub fn into_quotient(self) -> Quotient {
        let mut basis = Vec::new();
        let mut index = vec![usize::MAX; self.ambient];
        for c in 0..self.ambient {
            if self.pivot_row[c].is_none() {
                index[c] = basis.len();
                basis.push(c);
            }
        }
        let proj = (0..self.ambient)
            .map(|c| match self.pivot_row[c] {
                None => vec![(index[c], Scalar::ONE)],
                Some(r) => self.rows[r][1..].iter().map(|(j, x)| (index[*j], -x.clone())).collect(),
            })
            .collect();
        Quotient { ambient: self.ambient, basis, proj }
    }
}

/// A quotient `K^n / W` whose basis is the set of non-pivot columns of the RREF of `W`.
#[derive(Clone, Debug)]
pub struct Quotient {
    ambient: usize,
    basis: Vec<usize>,
    proj: Vec<SparseVec>,
}

impl Quotient {
    pub fn build(ambient: usize, relations: impl IntoIterator<Item = SparseVec>) -> Quotient {
        let mut e = SparseEchelon::new(ambient);
        for r in relations {
            e.insert(&r);
        }
        e.into_quotient()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Ambient index representing quotient basis vector `q`.
    pub fn section(&self, q: usize) -> usize {
        self.basis[q]
    }

    /// Image of the ambient basis vector `c`.
    pub fn proj_col(&self, c: usize) -> &SparseVec {
        &self.proj[c]
    }

    pub fn project(&self, v: &[Scalar]) -> Vector {
        let mut out = vec![Scalar::ZERO; self.dim()];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (q, y) in &self.proj[c] {
                out[*q].add_mul(x, y);
            }
        }
        out
    }

    pub fn projection_matrix(&self) -> Mat {
        let mut m = Mat::zeros(self.dim(), self.ambient);
        for c in 0..self.ambient {
            for (q, y) in &self.proj[c] {
                m.set(*q, c, y.clone());
            }
        }
        m
    }

    pub fn section_matrix(&self) -> Mat {
        let mut m = Mat::zeros(self.ambient, self.dim());
        for (q, &c) in self.basis.iter().enumerate() {
            m.set(c, q, Scalar::ONE);
        }
        m
    }
}

/// Quotient of `K^n` by a subspace, per the dense API: projection and section matrices.
pub fn quotient(ambient: usize, relations: &[Vector]) -> (Mat, Mat) {
    let q = Quotient::build(ambient, relations.iter().map(|r| sparse_from_dense(r)));
    (q.projection_matrix(), q.section_matrix())
}

#[cfg(test)]
mod tests {
    use super::super::echelon::rref;
    use super::*;
    use proptest::prelude::*;

    fn dense(rows: &[Vec<i64>], n: usize) -> Vec<Vector> {
        rows.iter().map(|r| r.iter().take(n).map(|&x| Scalar::from_int(x)).collect()).collect()
    }

    #[test]
    fn quotient_of_diagonal() {
        let rels = dense(&[vec![1, -1, 0]], 3);
        let (p, s) = quotient(3, &rels);
        assert_eq!(p.rows(), 2);
        assert_eq!(p.mul(&s), Mat::identity(2));
        assert!(p.mul_vec(&rels[0]).iter().all(Scalar::is_zero));
    }

    proptest! {
        #[test]
        fn sparse_rref_agrees_with_dense(rows in proptest::collection::vec(proptest::collection::vec(-2i64..3, 5), 0..6)) {
            let vs = dense(&rows, 5);
            let mut e = SparseEchelon::new(5);
            for v in &vs {
                e.insert(&sparse_from_dense(v));
            }
            let rank = e.rank();
            let q = e.into_quotient();
            let m = Mat::from_rows(vs.clone(), 5);
            let (_, pivots) = rref(&m);
            prop_assert_eq!(rank, pivots.len());
            let nonpivots: Vec<usize> = (0..5).filter(|c| !pivots.contains(c)).collect();
            prop_assert_eq!(&q.basis, &nonpivots);
            for v in &vs {
                prop_assert!(q.project(v).iter().all(Scalar::is_zero));
            }
            prop_assert_eq!(q.projection_matrix().mul(&q.section_matrix()), Mat::identity(q.dim()));
        }
    }
}
