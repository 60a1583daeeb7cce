use super::mat::{zeros, Mat, Vector};
use super::quotient::{sparse_from_dense, SparseVec};
use crate::scalar::Scalar;

/// A matrix stored by sparse columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat {
    rows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMat {
    /// Columns must be sorted by row index with nonzero values.
    pub fn from_cols(rows: usize, cols: Vec<SparseVec>) -> SparseMat {
        debug_assert!(cols.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0) && c.iter().all(|(r, x)| *r < rows && !x.is_zero())));
        SparseMat { rows, cols }
    }

    pub fn from_dense(m: &Mat) -> SparseMat {
        SparseMat { rows: m.rows(), cols: (0..m.cols()).map(|j| sparse_from_dense(&m.col(j))).collect() }
    }

    pub fn to_dense(&self) -> Mat {
        let mut m = Mat::zeros(self.rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c {
                m.set(*i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn sparse_col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn col(&self, j: usize) -> Vector {
        let mut v = zeros(self.rows);
        for (i, x) in &self.cols[j] {
            v[*i] = x.clone();
        }
        v
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        let mut out = zeros(self.rows);
        for (c, x) in self.cols.iter().zip(v) {
            if x.is_zero() {
                continue;
            }
            for (i, y) in c {
                out[*i].add_mul(x, y);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_product() {
        let m = Mat::from_rows(
            vec![
                vec![Scalar::ONE, Scalar::ZERO, Scalar::from_int(2)],
                vec![Scalar::ZERO, Scalar::ZERO, Scalar::ratio(-1, 3)],
            ],
            3,
        );
        let s = SparseMat::from_dense(&m);
        assert_eq!(s.to_dense(), m);
        let v = vec![Scalar::from_int(3), Scalar::from_int(5), Scalar::ONE];
        assert_eq!(s.mul_vec(&v), m.mul_vec(&v));
        assert_eq!(s.col(2), m.col(2));
        assert!(s.sparse_col(1).is_empty());
    }
}
