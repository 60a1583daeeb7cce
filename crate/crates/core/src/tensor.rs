//! Iterated tensor products over `A`.
//!
//! A space `T(L)` for a list `L = [m_0, …, m_{k-1}]` of registered bimodules is built
//! right-nested as `m_0 ⊗_A T([m_1, …])`, each step a quotient of the `K`-tensor
//! product by the balancing relations. Basis vectors of `T(L)` are standard words
//! (one basis index per factor) and any word of basis indices is a pure tensor,
//! which makes regrouping of tensor factors free: `T` is strictly associative.
//! `T([])` is the algebra itself.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use crate::algebra::Algebra;
use crate::bimodule::{AtomId, Bimodule};
use crate::linalg::{self, inverse, Mat, Quotient, SparseMat, SparseVec, Vector};
use crate::scalar::Scalar;

enum Kind {
    Unit,
    Atom,
    Product { tail: Arc<Space>, quotient: Quotient },
}

/// One tensor space `T(L)` with its induced bimodule structure.
pub struct Space {
    factors: Vec<AtomId>,
    dim: usize,
    kind: Kind,
    left: Vec<SparseMat>,
    right: Vec<SparseMat>,
    words: Vec<Vec<usize>>,
    memo: Mutex<HashMap<Vec<usize>, Arc<SparseVec>>>,
}

impl Space {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[AtomId] {
        &self.factors
    }

    /// Standard word of basis vector `q`.
    pub fn word(&self, q: usize) -> &[usize] {
        &self.words[q]
    }

    pub fn left(&self, i: usize) -> &SparseMat {
        &self.left[i]
    }

    pub fn right(&self, i: usize) -> &SparseMat {
        &self.right[i]
    }

    /// Class of the pure tensor with the given basis indices.
    pub fn project_word(&self, word: &[usize]) -> Arc<SparseVec> {
        debug_assert_eq!(word.len(), self.factors.len());
        match &self.kind {
            Kind::Unit => panic!("the unit space has no words"),
            Kind::Atom => Arc::new(vec![(word[0], Scalar::ONE)]),
            Kind::Product { tail, quotient } => {
                if let Some(v) = self.memo.lock().unwrap().get(word) {
                    return v.clone();
                }
                let t = tail.project_word(&word[1..]);
                let dt = tail.dim;
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (qt, c) in t.iter() {
                    for (q, x) in quotient.proj_col(word[0] * dt + qt) {
                        *acc.entry(*q).or_default() += &(c * x);
                    }
                }
                let v: SparseVec = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
                let v = Arc::new(v);
                self.memo.lock().unwrap().insert(word.to_vec(), v.clone());
                v
            }
        }
    }

    fn act(mats: &[SparseMat], a: &[Scalar], v: &[Scalar]) -> Vector {
        let mut out = linalg::zeros(v.len());
        for (m, c) in mats.iter().zip(a) {
            if !c.is_zero() {
                linalg::axpy(&mut out, c, &m.mul_vec(v));
            }
        }
        out
    }

    pub fn left_act(&self, a: &[Scalar], v: &[Scalar]) -> Vector {
        Space::act(&self.left, a, v)
    }

    pub fn right_act(&self, v: &[Scalar], a: &[Scalar]) -> Vector {
        Space::act(&self.right, a, v)
    }
}

fn add_sparse(out: &mut [Scalar], c: &Scalar, v: &SparseVec) {
    for (k, x) in v {
        out[*k].add_mul(c, x);
    }
}

fn add_sparse_map(out: &mut BTreeMap<usize, Scalar>, c: &Scalar, v: &SparseVec) {
    for (k, x) in v {
        out.entry(*k).or_default().add_mul(c, x);
    }
}

/// Registry of bimodules and of the tensor spaces built from them.
pub struct Spaces {
    algebra: Arc<Algebra>,
    atoms: RwLock<Vec<Arc<Bimodule>>>,
    spaces: Mutex<HashMap<Vec<AtomId>, Arc<Space>>>,
    frozen: Mutex<HashMap<Vec<AtomId>, AtomId>>,
}

impl Spaces {
    pub fn new(algebra: Arc<Algebra>) -> Spaces {
        Spaces {
            algebra,
            atoms: RwLock::new(Vec::new()),
            spaces: Mutex::new(HashMap::new()),
            frozen: Mutex::new(HashMap::new()),
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn add_atom(&self, m: Bimodule) -> AtomId {
        let mut atoms = self.atoms.write().unwrap();
        atoms.push(Arc::new(m));
        atoms.len() - 1
    }

    pub fn atom(&self, id: AtomId) -> Arc<Bimodule> {
        self.atoms.read().unwrap()[id].clone()
    }

    pub fn name(&self, id: AtomId) -> String {
        self.atom(id).name.clone()
    }

    pub fn list_name(&self, list: &[AtomId]) -> String {
        if list.is_empty() {
            return "A".into();
        }
        list.iter().map(|&m| self.name(m)).collect::<Vec<_>>().join("⊗")
    }

    pub fn space(&self, factors: &[AtomId]) -> Arc<Space> {
        if let Some(s) = self.spaces.lock().unwrap().get(factors) {
            return s.clone();
        }
        let built = Arc::new(self.build(factors));
        self.spaces.lock().unwrap().entry(factors.to_vec()).or_insert(built).clone()
    }

    pub fn dim(&self, factors: &[AtomId]) -> usize {
        self.space(factors).dim
    }

    fn build(&self, factors: &[AtomId]) -> Space {
        let alg = &self.algebra;
        let n = alg.dim();
        let memo = Mutex::new(HashMap::new());
        match factors {
            [] => Space {
                factors: vec![],
                dim: n,
                kind: Kind::Unit,
                left: (0..n).map(|i| SparseMat::from_dense(alg.left_basis(i))).collect(),
                right: (0..n).map(|i| SparseMat::from_dense(alg.right_basis(i))).collect(),
                words: vec![],
                memo,
            },
            [m] => {
                let a = self.atom(*m);
                Space {
                    factors: vec![*m],
                    dim: a.dim,
                    kind: Kind::Atom,
                    left: a.left.iter().map(SparseMat::from_dense).collect(),
                    right: a.right.iter().map(SparseMat::from_dense).collect(),
                    words: (0..a.dim).map(|q| vec![q]).collect(),
                    memo,
                }
            }
            [h, rest @ ..] => {
                let head = self.atom(*h);
                let tail = self.space(rest);
                let (dh, dt) = (head.dim, tail.dim);
                let mut relations = Vec::new();
                for a in 0..n {
                    let (r, l) = (&head.right[a], &tail.left[a]);
                    for i in 0..dh {
                        for qt in 0..dt {
                            let mut rel: BTreeMap<usize, Scalar> = BTreeMap::new();
                            for i2 in 0..dh {
                                let c = r.get(i2, i);
                                if !c.is_zero() {
                                    *rel.entry(i2 * dt + qt).or_default() += c;
                                }
                            }
                            for (q2, c) in l.sparse_col(qt) {
                                *rel.entry(i * dt + q2).or_default() -= c;
                            }
                            let rel: SparseVec = rel.into_iter().filter(|(_, x)| !x.is_zero()).collect();
                            if !rel.is_empty() {
                                relations.push(rel);
                            }
                        }
                    }
                }
                let quotient = Quotient::build(dh * dt, relations);
                let dim = quotient.dim();
                let words: Vec<Vec<usize>> = (0..dim)
                    .map(|q| {
                        let p = quotient.section(q);
                        let mut w = vec![p / dt];
                        w.extend_from_slice(tail.word(p % dt));
                        w
                    })
                    .collect();
                let induced = |f: &dyn Fn(usize, usize, &mut BTreeMap<usize, Scalar>)| -> SparseMat {
                    let cols = (0..dim)
                        .map(|q| {
                            let p = quotient.section(q);
                            let mut col = BTreeMap::new();
                            f(p / dt, p % dt, &mut col);
                            col.into_iter().filter(|(_, x): &(usize, Scalar)| !x.is_zero()).collect()
                        })
                        .collect();
                    SparseMat::from_cols(dim, cols)
                };
                let left = (0..n)
                    .map(|a| {
                        induced(&|i, qt, col| {
                            for i2 in 0..dh {
                                let c = head.left[a].get(i2, i);
                                if !c.is_zero() {
                                    add_sparse_map(col, c, quotient.proj_col(i2 * dt + qt));
                                }
                            }
                        })
                    })
                    .collect();
                let right = (0..n)
                    .map(|a| {
                        induced(&|i, qt, col| {
                            for (q2, c) in tail.right[a].sparse_col(qt) {
                                add_sparse_map(col, c, quotient.proj_col(i * dt + q2));
                            }
                        })
                    })
                    .collect();
                Space { factors: factors.to_vec(), dim, kind: Kind::Product { tail, quotient }, left, right, words, memo }
            }
        }
    }

    /// Dense class of a pure tensor.
    pub fn project_word(&self, factors: &[AtomId], word: &[usize]) -> Vector {
        let s = self.space(factors);
        let mut out = linalg::zeros(s.dim);
        add_sparse(&mut out, &Scalar::ONE, &s.project_word(word));
        out
    }

    pub fn left_act(&self, factors: &[AtomId], a: &[Scalar], v: &[Scalar]) -> Vector {
        self.space(factors).left_act(a, v)
    }

    pub fn right_act(&self, factors: &[AtomId], v: &[Scalar], a: &[Scalar]) -> Vector {
        self.space(factors).right_act(v, a)
    }

    /// `x ⊗ y ∈ T(l1 ++ l2)` for `x ∈ T(l1)`, `y ∈ T(l2)`.
    pub fn tensor(&self, l1: &[AtomId], x: &[Scalar], l2: &[AtomId], y: &[Scalar]) -> Vector {
        if l1.is_empty() {
            return if l2.is_empty() { self.algebra.mul(x, y) } else { self.left_act(l2, x, y) };
        }
        if l2.is_empty() {
            return self.right_act(l1, x, y);
        }
        let (s1, s2) = (self.space(l1), self.space(l2));
        let target: Vec<AtomId> = l1.iter().chain(l2).copied().collect();
        let t = self.space(&target);
        let mut out = linalg::zeros(t.dim);
        for (p, xp) in x.iter().enumerate() {
            if xp.is_zero() {
                continue;
            }
            for (q, yq) in y.iter().enumerate() {
                if yq.is_zero() {
                    continue;
                }
                let c = xp * yq;
                match (&t.kind, l1.len()) {
                    (Kind::Product { quotient, .. }, 1) => add_sparse(&mut out, &c, quotient.proj_col(p * s2.dim + q)),
                    _ => {
                        let mut w = s1.words[p].clone();
                        w.extend_from_slice(&s2.words[q]);
                        add_sparse(&mut out, &c, &t.project_word(&w));
                    }
                }
            }
        }
        out
    }

    /// Image of basis vector `q` of `T(src)` under `id ⊗ f ⊗ id`, where `f` acts on
    /// factors `start..end` and lands in `T(f_dst)`.
    pub fn whisker_col(&self, src: &[AtomId], start: usize, end: usize, f: &Mat, f_dst: &[AtomId], q: usize) -> Vector {
        let s = self.space(src);
        if src.is_empty() {
            return f.col(q);
        }
        let w = &s.words[q];
        let mid: Vector = if start == end {
            self.algebra.unit().clone()
        } else {
            self.project_word(&src[start..end], &w[start..end])
        };
        let y = f.mul_vec(&mid);
        let (pl, sl) = (&src[..start], &src[end..]);
        let target: Vec<AtomId> = pl.iter().chain(f_dst).chain(sl).copied().collect();
        if !f_dst.is_empty() {
            let t = self.space(&target);
            let fs = self.space(f_dst);
            let mut out = linalg::zeros(t.dim);
            let mut word = Vec::with_capacity(target.len());
            for (k, c) in y.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                word.clear();
                word.extend_from_slice(&w[..start]);
                word.extend_from_slice(&fs.words[k]);
                word.extend_from_slice(&w[end..]);
                add_sparse(&mut out, c, &t.project_word(&word));
            }
            return out;
        }
        match (pl.is_empty(), sl.is_empty()) {
            (true, true) => y,
            (true, false) => self.left_act(sl, &y, &self.project_word(sl, &w[end..])),
            (false, true) => self.right_act(pl, &self.project_word(pl, &w[..start]), &y),
            (false, false) => {
                let p = self.right_act(pl, &self.project_word(pl, &w[..start]), &y);
                self.tensor(pl, &p, sl, &self.project_word(sl, &w[end..]))
            }
        }
    }

    /// Matrix of `id ⊗ f ⊗ id` on `T(src)`.
    pub fn whisker(&self, src: &[AtomId], start: usize, end: usize, f: &Mat, f_dst: &[AtomId]) -> Mat {
        let target: Vec<AtomId> = src[..start].iter().chain(f_dst).chain(&src[end..]).copied().collect();
        let rows = self.dim(&target);
        Mat::from_fn_cols(rows, self.dim(src), |q| self.whisker_col(src, start, end, f, f_dst, q))
    }

    /// `(id ⊗ f ⊗ id)(x)` without materialising the whole matrix.
    pub fn apply_at(&self, src: &[AtomId], start: usize, end: usize, f: &Mat, f_dst: &[AtomId], x: &[Scalar]) -> Vector {
        let target: Vec<AtomId> = src[..start].iter().chain(f_dst).chain(&src[end..]).copied().collect();
        let mut out = linalg::zeros(self.dim(&target));
        for (q, c) in x.iter().enumerate() {
            if !c.is_zero() {
                linalg::axpy(&mut out, c, &self.whisker_col(src, start, end, f, f_dst, q));
            }
        }
        out
    }

    /// Registers `T(list)` as a single bimodule that remembers its factors.
    pub fn freeze(&self, list: &[AtomId]) -> AtomId {
        if let Some(&id) = self.frozen.lock().unwrap().get(list) {
            return id;
        }
        let s = self.space(list);
        let m = Bimodule {
            name: format!("({})", self.list_name(list)),
            dim: s.dim,
            left: s.left.iter().map(SparseMat::to_dense).collect(),
            right: s.right.iter().map(SparseMat::to_dense).collect(),
            parts: Some(list.to_vec()),
        };
        let mut frozen = self.frozen.lock().unwrap();
        if let Some(&id) = frozen.get(list) {
            return id;
        }
        let id = self.add_atom(m);
        frozen.insert(list.to_vec(), id);
        id
    }

    /// The list with every frozen atom replaced by its factors, recursively.
    pub fn flatten_list(&self, list: &[AtomId]) -> Vec<AtomId> {
        let mut out = Vec::new();
        for &m in list {
            match &self.atom(m).parts {
                Some(parts) => out.extend(self.flatten_list(parts)),
                None => out.push(m),
            }
        }
        out
    }

    fn flatten_word(&self, list: &[AtomId], word: &[usize], out: &mut Vec<usize>) {
        for (&m, &k) in list.iter().zip(word) {
            match &self.atom(m).parts {
                Some(parts) => {
                    let inner = self.space(parts).words[k].clone();
                    self.flatten_word(parts, &inner, out);
                }
                None => out.push(k),
            }
        }
    }

    /// The canonical isomorphism `T(list) → T(flatten_list(list))`.
    pub fn flatten_map(&self, list: &[AtomId]) -> Mat {
        let flat = self.flatten_list(list);
        let s = self.space(list);
        let t = self.space(&flat);
        if list.is_empty() {
            return Mat::identity(s.dim);
        }
        Mat::from_fn_cols(t.dim, s.dim, |q| {
            let mut w = Vec::new();
            self.flatten_word(list, &s.words[q], &mut w);
            let mut out = linalg::zeros(t.dim);
            add_sparse(&mut out, &Scalar::ONE, &t.project_word(&w));
            out
        })
    }

    /// Inverse of [`Spaces::flatten_map`].
    pub fn unflatten_map(&self, list: &[AtomId]) -> Mat {
        inverse(&self.flatten_map(list)).expect("regrouping tensor factors is an isomorphism")
    }

    /// The canonical isomorphism `T(src) → T(dst)` between two groupings of the same factors.
    pub fn regroup(&self, src: &[AtomId], dst: &[AtomId]) -> Mat {
        debug_assert_eq!(self.flatten_list(src), self.flatten_list(dst));
        self.unflatten_map(dst).mul(&self.flatten_map(src))
    }

    /// Checks that a `K`-bilinear map on `T(l1) × T(l2)` descends to `T(l1 ++ l2)`;
    /// returns the first violating `(x, a, y)` basis triple.
    pub fn check_balanced(
        &self,
        l1: &[AtomId],
        l2: &[AtomId],
        f: impl Fn(&Vector, &Vector) -> Vector,
    ) -> Result<(), (usize, usize, usize)> {
        let (s1, s2) = (self.space(l1), self.space(l2));
        let n = self.algebra.dim();
        for x in 0..s1.dim {
            let ex = linalg::unit(s1.dim, x);
            for a in 0..n {
                let xa = s1.right[a].col(x);
                for y in 0..s2.dim {
                    let ey = linalg::unit(s2.dim, y);
                    let ay = s2.left[a].col(y);
                    if f(&xa, &ey) != f(&ex, &ay) {
                        return Err((x, a, y));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `f: T(src) → T(dst)` commutes with both actions.
    pub fn is_bimodule_map(&self, f: &Mat, src: &[AtomId], dst: &[AtomId]) -> Result<(), String> {
        let (s, t) = (self.space(src), self.space(dst));
        for a in 0..self.algebra.dim() {
            let name = &self.algebra.names[a];
            if let Some((i, j)) = f.mul(&s.left[a].to_dense()).first_difference(&t.left[a].to_dense().mul(f)) {
                return Err(format!("left action of {name} at entry ({i}, {j})"));
            }
            if let Some((i, j)) = f.mul(&s.right[a].to_dense()).first_difference(&t.right[a].to_dense().mul(f)) {
                return Err(format!("right action of {name} at entry ({i}, {j})"));
            }
        }
        Ok(())
    }

    /// Descends a matrix on plain `K`-tensor coordinates of the atoms in `src` to
    /// the quotient spaces, after checking it maps relations to relations.
    pub fn descend(&self, plain: &Mat, src: &[AtomId], dst: &[AtomId]) -> Result<Mat, String> {
        let (ps, ss) = self.plain_maps(src);
        let (pd, _) = self.plain_maps(dst);
        let q = pd.mul(plain);
        // Relations are the kernel of the source projection; the descent condition is
        // that `q` vanishes there, i.e. `q = q·ss·ps`.
        let lifted = q.mul(&ss).mul(&ps);
        if let Some((i, j)) = lifted.first_difference(&q) {
            return Err(format!("map does not respect the tensor relations (row {i}, plain column {j})"));
        }
        Ok(q.mul(&ss))
    }

    /// Projection `⊗_K → ⊗_A` and its standard-word section, on plain coordinates
    /// where the index of `(i_0, …, i_{k-1})` is `((i_0·d_1 + i_1)·d_2 + …)`.
    pub fn plain_maps(&self, list: &[AtomId]) -> (Mat, Mat) {
        let s = self.space(list);
        if list.len() <= 1 {
            return (Mat::identity(s.dim), Mat::identity(s.dim));
        }
        let dims: Vec<usize> = list.iter().map(|&m| self.atom(m).dim).collect();
        let total: usize = dims.iter().product();
        let mut proj = Mat::zeros(s.dim, total);
        let mut word = vec![0usize; list.len()];
        for p in 0..total {
            let mut r = p;
            for k in (0..list.len()).rev() {
                word[k] = r % dims[k];
                r /= dims[k];
            }
            for (q, x) in s.project_word(&word).iter() {
                proj.set(*q, p, x.clone());
            }
        }
        let mut sec = Mat::zeros(total, s.dim);
        for q in 0..s.dim {
            let p = s.words[q].iter().zip(&dims).fold(0, |acc, (&i, &d)| acc * d + i);
            sec.set(p, q, Scalar::ONE);
        }
        (proj, sec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Functions on two points and the bimodule `K·ω` of a single edge `p → q`.
    fn setup() -> (Spaces, AtomId, AtomId) {
        let alg = Arc::new(Algebra::functions(&["p".into(), "q".into()]));
        let sp = Spaces::new(alg.clone());
        let a = sp.add_atom(Bimodule::regular(&alg));
        let pq = sp.add_atom(Bimodule::new(
            "w_pq",
            vec![Mat::identity(1), Mat::zeros(1, 1)],
            vec![Mat::zeros(1, 1), Mat::identity(1)],
        ));
        (sp, a, pq)
    }

    #[test]
    fn non_composable_edges_vanish() {
        let (sp, _, pq) = setup();
        assert_eq!(sp.dim(&[pq]), 1);
        assert_eq!(sp.dim(&[pq, pq]), 0);
    }

    #[test]
    fn tensoring_with_the_algebra_is_trivial() {
        let (sp, a, pq) = setup();
        assert_eq!(sp.dim(&[a, pq]), 1);
        assert_eq!(sp.dim(&[pq, a, a]), 1);
        let f = sp.flatten_map(&[sp.freeze(&[a, pq]), a]);
        assert_eq!(f.rows(), 1);
    }

    #[test]
    fn induced_actions_form_a_bimodule() {
        let (sp, a, pq) = setup();
        let list = [a, pq, a];
        let id = sp.freeze(&list);
        sp.atom(id).validate(sp.algebra()).unwrap();
    }

    #[test]
    fn balanced_check_detects_unbalanced_maps() {
        let (sp, a, _) = setup();
        // Multiplication is balanced, the map (x, y) ↦ x ⊗ y with the
        // first factor read literally is not.
        let alg = sp.algebra().clone();
        assert!(sp.check_balanced(&[a], &[a], |x, y| alg.mul(x, y)).is_ok());
        assert!(sp.check_balanced(&[a], &[a], |x, _| x.clone()).is_err());
    }

    #[test]
    fn descent_of_plain_maps() {
        let (sp, a, _) = setup();
        let (proj, sec) = sp.plain_maps(&[a, a]);
        assert_eq!(proj.mul(&sec), Mat::identity(2));
        let swap = Mat::identity(4);
        assert_eq!(sp.descend(&swap, &[a, a], &[a, a]).unwrap(), Mat::identity(2));
    }
}
