use super::mat::{is_zero, zeros, Mat, Vector};
use crate::scalar::Scalar;

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(p) = (r..a.rows()).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        swap_rows(&mut a, r, p);
        let inv = a.get(r, c).inv();
        for j in c..a.cols() {
            let x = a.get(r, j) * &inv;
            a.set(r, j, x);
        }
        for i in 0..a.rows() {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..a.cols() {
                let b = a.get(r, j);
                if !b.is_zero() {
                    let x = a.get(i, j) - &(&f * b);
                    a.set(i, j, x);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

fn swap_rows(a: &mut Mat, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..a.cols() {
        let x = a.get(i, c).clone();
        let y = a.get(j, c).clone();
        a.set(i, c, y);
        a.set(j, c, x);
    }
}

pub fn rank(m: &Mat) -> usize {
    rref(m).1.len()
}

/// Kernel basis; the vector for free column `f` has a 1 at `f` and 0 at the other free columns.
pub fn kernel(m: &Mat) -> Vec<Vector> {
    let (r, pivots) = rref(m);
    let n = m.cols();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = zeros(n);
            v[f] = Scalar::ONE;
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, f);
            }
            v
        })
        .collect()
}

/// Free columns of the kernel basis returned by [`kernel`].
pub fn free_columns(m: &Mat) -> Vec<usize> {
    let pivots = rref(m).1;
    (0..m.cols()).filter(|c| !pivots.contains(c)).collect()
}

pub fn inverse(m: &Mat) -> Option<Mat> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    if n == 0 {
        return Some(Mat::zeros(0, 0));
    }
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, n + i, Scalar::ONE);
    }
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, r.get(i, n + j).clone());
        }
    }
    Some(inv)
}

/// Some solution of `m·x = b`, if one exists.
pub fn solve(m: &Mat, b: &[Scalar]) -> Option<Vector> {
    let n = m.cols();
    let mut aug = Mat::zeros(m.rows(), n + 1);
    for i in 0..m.rows() {
        for j in 0..n {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zeros(n);
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, n).clone();
    }
    Some(x)
}

/// A subspace of `K^n`, stored as the nonzero rows of a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vector]) -> Subspace {
        let m = Mat::from_rows(vectors.to_vec(), ambient);
        let (r, pivots) = rref(&m);
        let rows: Vec<Vector> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis: Mat::from_rows(rows, ambient), pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> Vec<Vector> {
        self.basis.to_rows()
    }

    /// Reduces `v` modulo the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut w = v.to_vec();
        for (row, &p) in self.pivots.iter().enumerate() {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (j, x) in self.basis.row(row).iter().enumerate() {
                if !x.is_zero() {
                    w[j] -= &(&f * x);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero(&self.reduce(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Mat {
        let cols = rows[0].len();
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect(), cols)
    }

    #[test]
    fn rref_of_identity_and_zero() {
        let (r, p) = rref(&Mat::identity(3));
        assert_eq!(r, Mat::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        let (r, p) = rref(&Mat::zeros(2, 3));
        assert!(r.is_zero() && p.is_empty());
    }

    #[test]
    fn rank_deficient_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let k = kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(is_zero(&a.mul_vec(&k[0])));
        assert_eq!(free_columns(&a), vec![2]);
    }

    #[test]
    fn inverse_and_solve() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        let x = solve(&a, &[Scalar::from_int(3), Scalar::from_int(2)]).unwrap();
        assert_eq!(x, vec![Scalar::ONE, Scalar::ONE]);
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[Scalar::ONE, Scalar::ZERO]).is_none());
    }

    #[test]
    fn subspace_membership() {
        let s = Subspace::span(3, &[vec![1.into(), 1.into(), 0.into()], vec![2.into(), 2.into(), 0.into()]]);
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&[3.into(), 3.into(), 0.into()]));
        assert!(!s.contains(&[1.into(), 0.into(), 0.into()]));
    }
}
