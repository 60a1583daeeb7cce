//! The crossing map `ϑ_E: 𝒯Vec A_• ⊗_A E → E ⊗_A 𝒯Vec A_•`, its inverse, and the
//! connection `∇v = coev(1)•v` on the operator algebra.
//!
//! `ϑ_E` in degree `n` is a table on the plain product `Vec^{⊗n} ⊗_K E` (quotient
//! coordinates in the first factor) with one block per target degree `m ≤ n`, landing
//! in `E ⊗_A Vec^{⊗m}`. Plain tables are needed because the domain tensor product is
//! balanced with the modified right action `v•a`, which is checked separately.
//! The inverse lands in graded plain representatives, compared modulo the relations
//! `(v•a)⊗e − v⊗a·e`.

use std::sync::Arc;

use crate::bimodule::AtomId;
use crate::connection::ConnectionModule;
use crate::diffop::kron_vec;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::linalg::{self, inverse, sparse_from_dense, Mat, SparseEchelon, Vector};
use crate::scalar::Scalar;

type Check = std::result::Result<(), String>;

/// One degree of `ϑ_E` or `ϑ_E⁻¹`, as blocks indexed by the other side's degree.
#[derive(Clone, Debug)]
pub struct ThetaDegree {
    pub blocks: Vec<Mat>,
}

impl ThetaDegree {
    pub fn apply(&self, x: &[Scalar]) -> Vec<Vector> {
        self.blocks.iter().map(|b| b.mul_vec(x)).collect()
    }
}

fn add_blocks(acc: &mut [Vector], add: &[Vector]) {
    for (a, b) in acc.iter_mut().zip(add) {
        *a = linalg::add(a, b);
    }
}

fn sub_blocks(acc: &mut [Vector], sub: &[Vector]) {
    for (a, b) in acc.iter_mut().zip(sub) {
        *a = linalg::sub(a, b);
    }
}

impl Geometry {
    fn e_vec_list(&self, e: AtomId, m: usize) -> Vec<AtomId> {
        [e].into_iter().chain(self.vec_n(m)).collect()
    }

    fn vec_e_list(&self, n: usize, e: AtomId) -> Vec<AtomId> {
        self.vec_n(n).into_iter().chain([e]).collect()
    }

    /// `σ_E^{-1}` transported to fields, `Vec ⊗_A E → E ⊗_A Vec`,
    /// `v⊗e ↦ (ev⊗id⊗id)(v⊗σ_E(e⊗α)⊗w)` with `coev(1) = α⊗w`, and its inverse.
    pub fn vec_braid<'m>(&self, m: &'m ConnectionModule) -> Result<&'m (Mat, Mat)> {
        let sigma = m.require_sigma()?;
        let pair = m.vec_braid.get_or_init(|| {
            let sp = &self.spaces;
            let (o, v, e) = (self.omega, self.vec, m.atom);
            let src = [v, e];
            let forward = Mat::from_fn_cols(self.dim(&[e, v]), self.dim(&src), |q| {
                let x = sp.tensor(&src, &linalg::unit(self.dim(&src), q), &[o, v], &self.dual.coev);
                let y = sp.apply_at(&[v, e, o, v], 1, 3, sigma, &[o, e], &x);
                sp.apply_at(&[v, o, e, v], 0, 2, &self.dual.ev, &[], &y)
            });
            inverse(&forward).map(|inv| (forward, inv))
        });
        pair.as_ref().ok_or_else(|| Error::SigmaNotInvertible(format!("{} (transported to vector fields)", m.name)))
    }

    /// The map `Vec^{⊗n} ⊗_K E → Vec^{⊗n} ⊗_A E`.
    fn plain_to_vec_e(&self, n: usize, e: AtomId) -> Mat {
        let sp = &self.spaces;
        let (dn, de) = (self.dim_fields(n), self.dim(&[e]));
        let vn = self.vec_n(n);
        Mat::from_fn_cols(self.dim(&self.vec_e_list(n, e)), dn * de, |c| {
            sp.tensor(&vn, &linalg::unit(dn, c / de), &[e], &linalg::unit(de, c % de))
        })
    }

    /// `ϑ_E` in degree `n`.
    pub fn theta(&self, m: &ConnectionModule, n: usize) -> Result<Arc<ThetaDegree>> {
        if n > self.degree {
            return Err(Error::TruncationExceeded { requested: n, limit: self.degree });
        }
        if n >= 1 {
            self.vec_braid(m)?;
        }
        m.memo_theta.try_get_or(&n, || {
            let sp = &self.spaces;
            let alg = self.algebra();
            let de = m.dim(self);
            match n {
                0 => Ok(ThetaDegree {
                    blocks: vec![Mat::from_fn_cols(de, alg.dim() * de, |c| {
                        sp.left_act(&[m.atom], &alg.basis(c / de), &linalg::unit(de, c % de))
                    })],
                }),
                1 => {
                    let p = self.plain_to_vec_e(1, m.atom);
                    let (braid, _) = self.vec_braid(m)?;
                    Ok(ThetaDegree { blocks: vec![(*self.act_matrix(m, 1)).clone(), braid.mul(&p)] })
                }
                _ => {
                    let s = sp.space(&self.vec_n(n));
                    let rest = self.vec_n(n - 1);
                    let dv = self.dim(&[self.vec]);
                    let cols: Vec<Vec<Vector>> = (0..s.dim() * de)
                        .map(|c| {
                            let w = s.word(c / de);
                            let u = linalg::unit(dv, w[0]);
                            let v = sp.project_word(&rest, &w[1..]);
                            self.theta_split(m, &u, n - 1, &v, &linalg::unit(de, c % de))
                        })
                        .collect::<Result<_>>()?;
                    let blocks = (0..=n).map(|k| Mat::from_cols(self.dim(&self.e_vec_list(m.atom, k)), &cols.iter().map(|b| b[k].clone()).collect::<Vec<_>>())).collect();
                    Ok(ThetaDegree { blocks })
                }
            }
        })
    }

    /// `ϑ_E(v⊗e)` for `v ∈ Vec^{⊗n}`, blocks `0..=n`.
    pub fn theta_apply(&self, m: &ConnectionModule, n: usize, v: &[Scalar], e: &[Scalar]) -> Result<Vec<Vector>> {
        Ok(self.theta(m, n)?.apply(&kron_vec(v, e)))
    }

    /// The recursion
    /// `ϑ((w⊗v)⊗e) = (▷⊗id)(id⊗ϑ) + (σ⁻¹⊗id)(id⊗ϑ) + (id⊗•)(σ⁻¹⊗id)(id⊗ϑ) − ϑ((w•_n v)⊗e)`
    /// evaluated on the factors `w ∈ Vec`, `v ∈ Vec^{⊗n}`, `e ∈ E`.
    pub fn theta_split(&self, m: &ConnectionModule, w: &[Scalar], n: usize, v: &[Scalar], e: &[Scalar]) -> Result<Vec<Vector>> {
        let sp = &self.spaces;
        let (braid, _) = self.vec_braid(m)?;
        let y = self.theta_apply(m, n, v, e)?;
        let mut out: Vec<Vector> = (0..=n + 1).map(|k| linalg::zeros(self.dim(&self.e_vec_list(m.atom, k)))).collect();
        let de = m.dim(self);
        let dv = self.dim(&[self.vec]);
        let ev_space = sp.space(&[m.atom, self.vec]);
        for (k, yk) in y.iter().enumerate() {
            let list = self.e_vec_list(m.atom, k);
            let s = sp.space(&list);
            let vk = self.vec_n(k);
            for (q, c) in yk.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let word = s.word(q);
                let ep = linalg::unit(de, word[0]);
                let uu = if k == 0 { self.algebra().unit().clone() } else { sp.project_word(&vk, &word[1..]) };
                let t1 = sp.tensor(&[m.atom], &self.act_homogeneous(m, 1, w, &ep), &vk, &uu);
                linalg::axpy(&mut out[k], c, &t1);
                let bw = braid.mul_vec(&sp.tensor(&[self.vec], w, &[m.atom], &ep));
                let t2 = sp.tensor(&[m.atom, self.vec], &bw, &vk, &uu);
                linalg::axpy(&mut out[k + 1], c, &t2);
                for (r, c2) in bw.iter().enumerate() {
                    if c2.is_zero() {
                        continue;
                    }
                    let fw = ev_space.word(r);
                    let low = self.bullet_vec(1, &linalg::unit(dv, fw[1]), k, &uu, k);
                    let t3 = sp.tensor(&[m.atom], &linalg::unit(de, fw[0]), &vk, &low);
                    linalg::axpy(&mut out[k], &(c * c2), &t3);
                }
            }
        }
        let wv = self.bullet_vec(1, w, n, v, n);
        sub_blocks(&mut out, &self.theta_apply(m, n, &wv, e)?);
        Ok(out)
    }

    /// `(f⊗u)•a` on `E ⊗_A Vec^{⊗k}`, blocks `0..=k`.
    fn right_bullet(&self, e: AtomId, k: usize, y: &[Scalar], a: &[Scalar]) -> Vec<Vector> {
        let sp = &self.spaces;
        let s = sp.space(&self.e_vec_list(e, k));
        let de = self.dim(&[e]);
        let mut out: Vec<Vector> = (0..=k).map(|r| linalg::zeros(self.dim(&self.e_vec_list(e, r)))).collect();
        for (q, c) in y.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let word = s.word(q);
            let f = linalg::unit(de, word[0]);
            let u = if k == 0 { self.algebra().unit().clone() } else { sp.project_word(&self.vec_n(k), &word[1..]) };
            for (r, o) in out.iter_mut().enumerate() {
                let ua = self.bullet_vec(k, &u, 0, a, r);
                linalg::axpy(o, c, &sp.tensor(&[e], &f, &self.vec_n(r), &ua));
            }
        }
        out
    }

    /// Properties `1ₙ`–`4ₙ` of `ϑ_E` in degree `n`: the recursion respects `w·a⊗v = w⊗a·v`,
    /// `ϑ` respects `(v•a)⊗e = v⊗a·e`, is left `A`-linear and satisfies `ϑ(v⊗e·a) = ϑ(v⊗e)•a`.
    pub fn check_theta_module_properties(&self, m: &ConnectionModule, n: usize) -> Check {
        let sp = &self.spaces;
        let alg = self.algebra();
        let err = |e: Error| e.to_string();
        let de = m.dim(self);
        let dn = self.dim_fields(n);
        let vn = self.vec_n(n);
        if n >= 2 {
            let dv = self.dim(&[self.vec]);
            let rest = self.vec_n(n - 1);
            let dr = self.dim(&rest);
            for i in 0..dv {
                let w = linalg::unit(dv, i);
                for a in 0..alg.dim() {
                    let ab = alg.basis(a);
                    let wa = sp.right_act(&[self.vec], &w, &ab);
                    for j in 0..dr {
                        let v = linalg::unit(dr, j);
                        let av = sp.left_act(&rest, &ab, &v);
                        for l in 0..de {
                            let e = linalg::unit(de, l);
                            if self.theta_split(m, &wa, n - 1, &v, &e).map_err(err)? != self.theta_split(m, &w, n - 1, &av, &e).map_err(err)? {
                                return Err(format!("1_{n} for {}: w{i}·{x} ⊗ v{j} vs w{i} ⊗ {x}·v{j} at e{l}", m.name, x = alg.names[a]));
                            }
                        }
                    }
                }
            }
        }
        for i in 0..dn {
            let v = linalg::unit(dn, i);
            for a in 0..alg.dim() {
                let ab = alg.basis(a);
                let va = self.bullet_right_algebra(n, &v, &ab);
                let av = sp.left_act(&vn, &ab, &v);
                for l in 0..de {
                    let e = linalg::unit(de, l);
                    let mut lhs: Vec<Vector> = (0..=n).map(|k| linalg::zeros(self.dim(&self.e_vec_list(m.atom, k)))).collect();
                    for (k, vak) in va.iter().enumerate() {
                        add_blocks(&mut lhs, &self.theta_apply(m, k, vak, &e).map_err(err)?);
                    }
                    let ae = sp.left_act(&[m.atom], &ab, &e);
                    if lhs != self.theta_apply(m, n, &v, &ae).map_err(err)? {
                        return Err(format!("2_{n} for {}: ϑ((v{i}•{x})⊗e{l}) != ϑ(v{i}⊗{x}·e{l})", m.name, x = alg.names[a]));
                    }
                    let y = self.theta_apply(m, n, &v, &e).map_err(err)?;
                    let left: Vec<Vector> = y.iter().enumerate().map(|(k, yk)| sp.left_act(&self.e_vec_list(m.atom, k), &ab, yk)).collect();
                    if self.theta_apply(m, n, &av, &e).map_err(err)? != left {
                        return Err(format!("3_{n} for {}: ϑ({x}·v{i}⊗e{l}) != {x}·ϑ(v{i}⊗e{l})", m.name, x = alg.names[a]));
                    }
                    let mut right: Vec<Vector> = (0..=n).map(|k| linalg::zeros(self.dim(&self.e_vec_list(m.atom, k)))).collect();
                    for (k, yk) in y.iter().enumerate() {
                        let rb = self.right_bullet(m.atom, k, yk, &ab);
                        add_blocks(&mut right[..=k], &rb);
                    }
                    let ea = sp.right_act(&[m.atom], &e, &ab);
                    if self.theta_apply(m, n, &v, &ea).map_err(err)? != right {
                        return Err(format!("4_{n} for {}: ϑ(v{i}⊗e{l}·{x}) != ϑ(v{i}⊗e{l})•{x}", m.name, x = alg.names[a]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Property `5ₙ`: `v▷(e⊗f) = (id_E⊗▷)(ϑ_E⊗id_F)(v⊗e⊗f)`.
    pub fn check_theta_action(&self, e: &ConnectionModule, f: &ConnectionModule, n: usize) -> Check {
        let sp = &self.spaces;
        let err = |x: Error| x.to_string();
        let ef = self.connection_on(&[e.atom, f.atom]).map_err(err)?;
        let to_frozen = sp.regroup(&[e.atom, f.atom], &[ef.atom]);
        let (de, df, dn) = (e.dim(self), f.dim(self), self.dim_fields(n));
        for i in 0..dn {
            let v = linalg::unit(dn, i);
            for j in 0..de {
                let x = linalg::unit(de, j);
                let y = self.theta_apply(e, n, &v, &x).map_err(err)?;
                for l in 0..df {
                    let z = linalg::unit(df, l);
                    let xz = to_frozen.mul_vec(&sp.tensor(&[e.atom], &x, &[f.atom], &z));
                    let lhs = self.act_homogeneous(&ef, n, &v, &xz);
                    let mut rhs = linalg::zeros(self.dim(&[e.atom, f.atom]));
                    for (k, yk) in y.iter().enumerate() {
                        let s = sp.space(&self.e_vec_list(e.atom, k));
                        for (q, c) in yk.iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            let word = s.word(q);
                            let u = if k == 0 { self.algebra().unit().clone() } else { sp.project_word(&self.vec_n(k), &word[1..]) };
                            let uf = self.act_homogeneous(f, k, &u, &z);
                            linalg::axpy(&mut rhs, c, &sp.tensor(&[e.atom], &linalg::unit(de, word[0]), &[f.atom], &uf));
                        }
                    }
                    if lhs != to_frozen.mul_vec(&rhs) {
                        return Err(format!("5_{n}: v{i}▷(e{j}⊗f{l}) differs for {} ⊗ {}", e.name, f.name));
                    }
                }
            }
        }
        Ok(())
    }

    /// The degree-`n` to degree-`n` block of `ϑ_E` is the `n`-fold braid by `σ_E^{-1}`.
    pub fn check_theta_top_block(&self, m: &ConnectionModule, n: usize) -> Check {
        let sp = &self.spaces;
        let err = |x: Error| x.to_string();
        let (braid, _) = self.vec_braid(m).map_err(err)?;
        let mut list = self.vec_e_list(n, m.atom);
        let mut acc = self.plain_to_vec_e(n, m.atom);
        for k in (0..n).rev() {
            acc = sp.whisker(&list, k, k + 2, braid, &[m.atom, self.vec]).mul(&acc);
            list.swap(k, k + 1);
        }
        let top = &self.theta(m, n).map_err(err)?.blocks[n];
        match top.first_difference(&acc) {
            Some((r, c)) => Err(format!("top block of ϑ for {} in degree {n} differs from the braid at ({r}, {c})", m.name)),
            None => Ok(()),
        }
    }

    /// `ϑ_E⁻¹` in degree `n`: `E ⊗_A Vec^{⊗n} → ⊕_k Vec^{⊗k} ⊗_K E` (plain representatives).
    pub fn theta_inverse(&self, m: &ConnectionModule, n: usize) -> Result<Arc<ThetaDegree>> {
        if n > self.degree {
            return Err(Error::TruncationExceeded { requested: n, limit: self.degree });
        }
        if n >= 1 {
            self.vec_braid(m)?;
        }
        m.memo_theta_inv.try_get_or(&n, || {
            let sp = &self.spaces;
            let alg = self.algebra();
            let de = m.dim(self);
            let plain_dim = |k: usize| self.dim_fields(k) * de;
            let src = self.e_vec_list(m.atom, n);
            let s = sp.space(&src);
            match n {
                0 => Ok(ThetaDegree { blocks: vec![Mat::from_fn_cols(plain_dim(0), de, |j| kron_vec(alg.unit(), &linalg::unit(de, j)))] }),
                1 => {
                    let (_, braid_inv) = self.vec_braid(m)?;
                    let (_, section) = sp.plain_maps(&[self.vec, m.atom]);
                    let b1 = section.mul(braid_inv);
                    let act = self.act_matrix(m, 1).mul(&b1);
                    let b0 = Mat::from_fn_cols(plain_dim(0), s.dim(), |q| linalg::scale(&Scalar::from_int(-1), &kron_vec(alg.unit(), &act.col(q))));
                    Ok(ThetaDegree { blocks: vec![b0, b1] })
                }
                _ => {
                    let cols: Vec<Vec<Vector>> = (0..s.dim()).map(|q| self.theta_inverse_word(m, n, s.word(q))).collect::<Result<_>>()?;
                    let blocks = (0..=n).map(|k| Mat::from_cols(plain_dim(k), &cols.iter().map(|b| b[k].clone()).collect::<Vec<_>>())).collect();
                    Ok(ThetaDegree { blocks })
                }
            }
        })
    }

    /// `ϑ⁻¹(f⊗u⊗v) = (id•ϑ⁻¹ − ϑ⁻¹(▷⊗id))(σ_E(f⊗u)⊗v) − ϑ⁻¹(f⊗(u•_{n−1}v))` on a standard word.
    fn theta_inverse_word(&self, m: &ConnectionModule, n: usize, word: &[usize]) -> Result<Vec<Vector>> {
        let sp = &self.spaces;
        let de = m.dim(self);
        let dv = self.dim(&[self.vec]);
        let rest = self.vec_n(n - 1);
        let (_, braid_inv) = self.vec_braid(m)?;
        let f = linalg::unit(de, word[0]);
        let u = linalg::unit(dv, word[1]);
        let v = sp.project_word(&rest, &word[2..]);
        let mut out: Vec<Vector> = (0..=n).map(|k| linalg::zeros(self.dim_fields(k) * de)).collect();
        let s = braid_inv.mul_vec(&sp.tensor(&[m.atom], &f, &[self.vec], &u));
        let ve = sp.space(&[self.vec, m.atom]);
        let inv = self.theta_inverse(m, n - 1)?;
        for (r, c) in s.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = ve.word(r);
            let (up, fp) = (linalg::unit(dv, w[0]), linalg::unit(de, w[1]));
            let z = inv.apply(&sp.tensor(&[m.atom], &fp, &rest, &v));
            for (k, zk) in z.iter().enumerate() {
                for target in [k, k + 1] {
                    let t = self.left_bullet_plain(&up, k, zk, target, de);
                    linalg::axpy(&mut out[target], c, &t);
                }
            }
            let acted = self.act_homogeneous(m, 1, &up, &fp);
            let z2 = inv.apply(&sp.tensor(&[m.atom], &acted, &rest, &v));
            for (k, zk) in z2.iter().enumerate() {
                linalg::axpy(&mut out[k], &-c.clone(), zk);
            }
        }
        let uv = self.bullet_vec(1, &u, n - 1, &v, n - 1);
        let z3 = inv.apply(&sp.tensor(&[m.atom], &f, &rest, &uv));
        sub_blocks(&mut out, &z3);
        Ok(out)
    }

    /// `(u •_r ·) ⊗ id_E` on a plain element of `Vec^{⊗k} ⊗_K E`.
    fn left_bullet_plain(&self, u: &[Scalar], k: usize, z: &[Scalar], r: usize, de: usize) -> Vector {
        let dk = self.dim_fields(k);
        let mut out = linalg::zeros(self.dim_fields(r) * de);
        for i in 0..dk {
            let col: Vec<Scalar> = (0..de).map(|j| z[i * de + j].clone()).collect();
            if linalg::is_zero(&col) {
                continue;
            }
            let ux = self.bullet_vec(1, u, k, &linalg::unit(dk, i), r);
            linalg::axpy(&mut out, &Scalar::ONE, &kron_vec(&ux, &col));
        }
        out
    }

    /// Relations `(v•a)⊗e − v⊗a·e` spanning the kernel from plain graded representatives
    /// onto `𝒯Vec A_• ⊗_A E`, in degrees `≤ n`.
    fn bullet_balance_relations(&self, m: &ConnectionModule, n: usize) -> SparseEchelon {
        let sp = &self.spaces;
        let alg = self.algebra();
        let de = m.dim(self);
        let offsets: Vec<usize> = (0..=n).scan(0, |acc, k| {
            let o = *acc;
            *acc += self.dim_fields(k) * de;
            Some(o)
        }).collect();
        let total = offsets[n] + self.dim_fields(n) * de;
        let mut ech = SparseEchelon::new(total);
        for k in 0..=n {
            let dk = self.dim_fields(k);
            for i in 0..dk {
                let v = linalg::unit(dk, i);
                for a in 0..alg.dim() {
                    let ab = alg.basis(a);
                    let va = self.bullet_right_algebra(k, &v, &ab);
                    for j in 0..de {
                        let e = linalg::unit(de, j);
                        let mut rel = linalg::zeros(total);
                        for (r, var) in va.iter().enumerate() {
                            for (x, c) in kron_vec(var, &e).into_iter().enumerate() {
                                rel[offsets[r] + x] += &c;
                            }
                        }
                        for (x, c) in kron_vec(&v, &sp.left_act(&[m.atom], &ab, &e)).into_iter().enumerate() {
                            rel[offsets[k] + x] -= &c;
                        }
                        ech.insert(&sparse_from_dense(&rel));
                    }
                }
            }
        }
        ech
    }

    /// `ϑ∘ϑ⁻¹ = id` on `E ⊗_A Vec^{⊗n}` and `ϑ⁻¹∘ϑ = id` modulo the balancing relations.
    pub fn check_theta_inverse(&self, m: &ConnectionModule, n: usize) -> Check {
        let err = |x: Error| x.to_string();
        let de = m.dim(self);
        let inv = self.theta_inverse(m, n).map_err(err)?;
        let dim_target = self.dim(&self.e_vec_list(m.atom, n));
        for q in 0..dim_target {
            let y = linalg::unit(dim_target, q);
            let z = inv.apply(&y);
            let mut back: Vec<Vector> = (0..=n).map(|k| linalg::zeros(self.dim(&self.e_vec_list(m.atom, k)))).collect();
            for (k, zk) in z.iter().enumerate() {
                let t = self.theta(m, k).map_err(err)?.apply(zk);
                add_blocks(&mut back[..=k], &t);
            }
            for (k, b) in back.iter().enumerate() {
                let expect = if k == n { y.clone() } else { linalg::zeros(b.len()) };
                if *b != expect {
                    return Err(format!("ϑ∘ϑ⁻¹ != id for {} at basis {q} of degree {n}, block {k}", m.name));
                }
            }
        }
        let ech = self.bullet_balance_relations(m, n);
        let offsets: Vec<usize> = (0..=n).scan(0, |acc, k| {
            let o = *acc;
            *acc += self.dim_fields(k) * de;
            Some(o)
        }).collect();
        let total = offsets[n] + self.dim_fields(n) * de;
        let th = self.theta(m, n).map_err(err)?;
        for c in 0..self.dim_fields(n) * de {
            let x = linalg::unit(self.dim_fields(n) * de, c);
            let y = th.apply(&x);
            let mut diff = linalg::zeros(total);
            for (k, yk) in y.iter().enumerate() {
                let z = self.theta_inverse(m, k).map_err(err)?.apply(yk);
                for (r, zr) in z.iter().enumerate() {
                    for (i, s) in zr.iter().enumerate() {
                        diff[offsets[r] + i] += s;
                    }
                }
            }
            diff[offsets[n] + c] -= &Scalar::ONE;
            if !ech.contains(&sparse_from_dense(&diff)) {
                return Err(format!("ϑ⁻¹∘ϑ != id for {} at plain basis {c} of degree {n}", m.name));
            }
        }
        Ok(())
    }

    /// `ϑ_{E⊗F} = (id_E⊗ϑ_F)(ϑ_E⊗id_F)` in degree `n`.
    pub fn check_theta_factorization(&self, e: &ConnectionModule, f: &ConnectionModule, n: usize) -> Check {
        let sp = &self.spaces;
        let err = |x: Error| x.to_string();
        let ef = self.connection_on(&[e.atom, f.atom]).map_err(err)?;
        let (de, df, dn) = (e.dim(self), f.dim(self), self.dim_fields(n));
        let from_pair = sp.regroup(&[e.atom, f.atom], &[ef.atom]);
        let regroups: Vec<Mat> = (0..=n)
            .map(|r| {
                let full: Vec<AtomId> = [e.atom].into_iter().chain(self.e_vec_list(f.atom, r)).collect();
                sp.regroup(&full, &self.e_vec_list(ef.atom, r))
            })
            .collect();
        for i in 0..dn {
            let v = linalg::unit(dn, i);
            for j in 0..de {
                let x = linalg::unit(de, j);
                let y = self.theta_apply(e, n, &v, &x).map_err(err)?;
                for l in 0..df {
                    let z = linalg::unit(df, l);
                    let xz = from_pair.mul_vec(&sp.tensor(&[e.atom], &x, &[f.atom], &z));
                    let lhs = self.theta_apply(&ef, n, &v, &xz).map_err(err)?;
                    let mut rhs: Vec<Vector> = (0..=n).map(|k| linalg::zeros(self.dim(&self.e_vec_list(ef.atom, k)))).collect();
                    for (k, yk) in y.iter().enumerate() {
                        let s = sp.space(&self.e_vec_list(e.atom, k));
                        for (q, c) in yk.iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            let word = s.word(q);
                            let u = if k == 0 { self.algebra().unit().clone() } else { sp.project_word(&self.vec_n(k), &word[1..]) };
                            let t = self.theta_apply(f, k, &u, &z).map_err(err)?;
                            for (r, tr) in t.iter().enumerate() {
                                let pair = sp.tensor(&[e.atom], &linalg::unit(de, word[0]), &self.e_vec_list(f.atom, r), tr);
                                linalg::axpy(&mut rhs[r], c, &regroups[r].mul_vec(&pair));
                            }
                        }
                    }
                    if lhs != rhs {
                        return Err(format!("ϑ_(E⊗F) != (id⊗ϑ_F)(ϑ_E⊗id) for {} ⊗ {} at v = {n}:{i}, e{j}, f{l}", e.name, f.name));
                    }
                }
            }
        }
        Ok(())
    }

    /// `ϑ_E(u•v⊗e) = (id_E⊗•)(ϑ_E⊗id)(id⊗ϑ_E)(u⊗v⊗e)` for basis `u, v` of total degree ≤ `max_total`.
    pub fn check_theta_product(&self, m: &ConnectionModule, max_total: usize) -> Check {
        let sp = &self.spaces;
        let err = |x: Error| x.to_string();
        let de = m.dim(self);
        let d = max_total.min(self.degree);
        for p in 0..=d {
            for q in 0..=d - p {
                let (dp, dq) = (self.dim_fields(p), self.dim_fields(q));
                for i in 0..dp {
                    let u = linalg::unit(dp, i);
                    for j in 0..dq {
                        let v = linalg::unit(dq, j);
                        for l in 0..de {
                            let e = linalg::unit(de, l);
                            let blocks = |deg: usize| -> Vec<Vector> { (0..=deg).map(|k| linalg::zeros(self.dim(&self.e_vec_list(m.atom, k)))).collect() };
                            let mut lhs = blocks(p + q);
                            for k in 0..=p + q {
                                let uv = self.bullet_vec(p, &u, q, &v, k);
                                add_blocks(&mut lhs[..=k], &self.theta_apply(m, k, &uv, &e).map_err(err)?);
                            }
                            let mut rhs = blocks(p + q);
                            let y = self.theta_apply(m, q, &v, &e).map_err(err)?;
                            for (k, yk) in y.iter().enumerate() {
                                let s = sp.space(&self.e_vec_list(m.atom, k));
                                for (qq, c) in yk.iter().enumerate() {
                                    if c.is_zero() {
                                        continue;
                                    }
                                    let word = s.word(qq);
                                    let ww = if k == 0 { self.algebra().unit().clone() } else { sp.project_word(&self.vec_n(k), &word[1..]) };
                                    let z = self.theta_apply(m, p, &u, &linalg::unit(de, word[0])).map_err(err)?;
                                    for (jj, zj) in z.iter().enumerate() {
                                        let s2 = sp.space(&self.e_vec_list(m.atom, jj));
                                        for (q2, c2) in zj.iter().enumerate() {
                                            if c2.is_zero() {
                                                continue;
                                            }
                                            let w2 = s2.word(q2);
                                            let u2 = if jj == 0 { self.algebra().unit().clone() } else { sp.project_word(&self.vec_n(jj), &w2[1..]) };
                                            for r in 0..=jj + k {
                                                let prod = self.bullet_vec(jj, &u2, k, &ww, r);
                                                let t = sp.tensor(&[m.atom], &linalg::unit(de, w2[0]), &self.vec_n(r), &prod);
                                                linalg::axpy(&mut rhs[r], &(c * c2), &t);
                                            }
                                        }
                                    }
                                }
                            }
                            if lhs != rhs {
                                return Err(format!("ϑ(u•v⊗e) mismatch for {} at u = {p}:{i}, v = {q}:{j}, e{l}", m.name));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `ϑ_A(v⊗a) = v•a` under `A ⊗_A 𝒯Vec A ≅ 𝒯Vec A`.
    pub fn check_theta_algebra(&self, n: usize) -> Check {
        let sp = &self.spaces;
        let err = |x: Error| x.to_string();
        let am = self.connection_on(&[self.a]).map_err(err)?;
        let alg = self.algebra();
        let dn = self.dim_fields(n);
        for i in 0..dn {
            let v = linalg::unit(dn, i);
            for a in 0..alg.dim() {
                let ab = alg.basis(a);
                let th = self.theta_apply(&am, n, &v, &ab).map_err(err)?;
                let prod = self.bullet_right_algebra(n, &v, &ab);
                for (k, tk) in th.iter().enumerate() {
                    let s = sp.space(&self.e_vec_list(self.a, k));
                    let mut merged = linalg::zeros(self.dim_fields(k));
                    for (q, c) in tk.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let word = s.word(q);
                        let x = if k == 0 { alg.unit().clone() } else { sp.project_word(&self.vec_n(k), &word[1..]) };
                        let y = if k == 0 { alg.mul(&alg.basis(word[0]), &x) } else { sp.left_act(&self.vec_n(k), &alg.basis(word[0]), &x) };
                        linalg::axpy(&mut merged, c, &y);
                    }
                    if merged != prod[k] {
                        return Err(format!("ϑ_A(v⊗{}) != v•{} at v = {n}:{i}, degree {k}", alg.names[a], alg.names[a]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Naturality `(T⊗id)ϑ_E = ϑ_F(id⊗T)` for a morphism `T: E → F`.
    pub fn check_theta_natural(&self, t: &Mat, e: &ConnectionModule, f: &ConnectionModule, n: usize) -> Check {
        let sp = &self.spaces;
        let err = |x: Error| x.to_string();
        let (de, dn) = (e.dim(self), self.dim_fields(n));
        for i in 0..dn {
            let v = linalg::unit(dn, i);
            for j in 0..de {
                let x = linalg::unit(de, j);
                let lhs: Vec<Vector> = self
                    .theta_apply(e, n, &v, &x)
                    .map_err(err)?
                    .iter()
                    .enumerate()
                    .map(|(k, y)| sp.apply_at(&self.e_vec_list(e.atom, k), 0, 1, t, &[f.atom], y))
                    .collect();
                let rhs = self.theta_apply(f, n, &v, &t.mul_vec(&x)).map_err(err)?;
                if lhs != rhs {
                    return Err(format!("(T⊗id)ϑ_E != ϑ_F(id⊗T) for {} → {} at v = {n}:{i}, e{j}", e.name, f.name));
                }
            }
        }
        Ok(())
    }

    /// `∇v = coev(1)•v` on `Vec^{⊗n}`, blocks `Ω¹ ⊗_A Vec^{⊗r}` for `r ≤ n+1`.
    pub fn unusual_nabla(&self, n: usize, v: &[Scalar]) -> Vec<Vector> {
        let sp = &self.spaces;
        let o = self.omega;
        let cs = sp.space(&[o, self.vec]);
        let (dom, dv) = (self.dim(&[o]), self.dim(&[self.vec]));
        let mut out: Vec<Vector> = (0..=n + 1).map(|r| linalg::zeros(self.dim(&self.e_vec_list(o, r)))).collect();
        for (q, c) in self.dual.coev.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = cs.word(q);
            for (r, o_r) in out.iter_mut().enumerate() {
                let uv = self.bullet_vec(1, &linalg::unit(dv, w[1]), n, v, r);
                linalg::axpy(o_r, c, &sp.tensor(&[o], &linalg::unit(dom, w[0]), &self.vec_n(r), &uv));
            }
        }
        out
    }

    /// Left Leibniz rule `∇(a•v) = da⊗v + a·∇v` and `∇(v•a) = ∇(v)•a` for the connection
    /// on the operator algebra, in degrees `< max`.
    pub fn check_unusual_connection(&self, max: usize) -> Check {
        let sp = &self.spaces;
        let alg = self.algebra();
        let o = self.omega;
        for n in 0..max.min(self.degree) {
            let dn = self.dim_fields(n);
            let vn = self.vec_n(n);
            for i in 0..dn {
                let v = linalg::unit(dn, i);
                let nv = self.unusual_nabla(n, &v);
                for a in 0..alg.dim() {
                    let ab = alg.basis(a);
                    let lhs = self.unusual_nabla(n, &sp.left_act(&vn, &ab, &v));
                    let mut rhs: Vec<Vector> = nv.iter().enumerate().map(|(r, x)| sp.left_act(&self.e_vec_list(o, r), &ab, x)).collect();
                    rhs[n] = linalg::add(&rhs[n], &sp.tensor(&[o], &self.d_of(&ab), &vn, &v));
                    if lhs != rhs {
                        return Err(format!("∇({0}•v) != d{0}⊗v + {0}·∇v at v = {n}:{i}", alg.names[a]));
                    }
                    let va = self.bullet_right_algebra(n, &v, &ab);
                    let mut lhs: Vec<Vector> = (0..=n + 1).map(|r| linalg::zeros(self.dim(&self.e_vec_list(o, r)))).collect();
                    for (k, vak) in va.iter().enumerate() {
                        add_blocks(&mut lhs[..=k + 1], &self.unusual_nabla(k, vak));
                    }
                    let mut rhs: Vec<Vector> = (0..=n + 1).map(|r| linalg::zeros(self.dim(&self.e_vec_list(o, r)))).collect();
                    for (r, x) in nv.iter().enumerate() {
                        add_blocks(&mut rhs[..=r], &self.right_bullet(o, r, x, &ab));
                    }
                    if lhs != rhs {
                        return Err(format!("∇(v•{0}) != ∇(v)•{0} at v = {n}:{i}", alg.names[a]));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(id⊗ϑ_E)∇_{𝒯⊗E} = ∇_{E⊗𝒯}ϑ_E` with `∇_{𝒯⊗E}(v⊗e) = ξ⊗(u•v)⊗e` and
    /// `∇_{E⊗𝒯}(e⊗v) = ∇_E e⊗v + σ_E(e⊗ξ)⊗(u•v)`, for `v` of degree `< max`.
    pub fn check_theta_morphism(&self, m: &ConnectionModule, max: usize) -> Check {
        let sp = &self.spaces;
        let err = |x: Error| x.to_string();
        let sigma = m.require_sigma().map_err(err)?;
        let (o, vv, e) = (self.omega, self.vec, m.atom);
        let de = m.dim(self);
        let dv = self.dim(&[vv]);
        let cs = sp.space(&[o, vv]);
        let dom = self.dim(&[o]);
        let oe_list = |r: usize| -> Vec<AtomId> { [o, e].into_iter().chain(self.vec_n(r)).collect() };
        let zero_blocks = |deg: usize| -> Vec<Vector> { (0..=deg).map(|r| linalg::zeros(self.dim(&oe_list(r)))).collect() };
        for n in 0..max.min(self.degree) {
            let dn = self.dim_fields(n);
            for i in 0..dn {
                let v = linalg::unit(dn, i);
                for l in 0..de {
                    let x = linalg::unit(de, l);
                    let mut lhs = zero_blocks(n + 1);
                    for (q, c) in self.dual.coev.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let w = cs.word(q);
                        let xi = linalg::unit(dom, w[0]);
                        for k in 0..=n + 1 {
                            let uv = self.bullet_vec(1, &linalg::unit(dv, w[1]), n, &v, k);
                            let th = self.theta_apply(m, k, &uv, &x).map_err(err)?;
                            for (r, tr) in th.iter().enumerate() {
                                linalg::axpy(&mut lhs[r], c, &sp.tensor(&[o], &xi, &self.e_vec_list(e, r), tr));
                            }
                        }
                    }
                    let mut rhs = zero_blocks(n + 1);
                    let y = self.theta_apply(m, n, &v, &x).map_err(err)?;
                    for (k, yk) in y.iter().enumerate() {
                        let s = sp.space(&self.e_vec_list(e, k));
                        let vk = self.vec_n(k);
                        for (q, c) in yk.iter().enumerate() {
                            if c.is_zero() {
                                continue;
                            }
                            let word = s.word(q);
                            let ep = linalg::unit(de, word[0]);
                            let ww = if k == 0 { self.algebra().unit().clone() } else { sp.project_word(&vk, &word[1..]) };
                            linalg::axpy(&mut rhs[k], c, &sp.tensor(&[o, e], &m.nabla.mul_vec(&ep), &vk, &ww));
                            let t = sp.tensor(&[e], &ep, &[o, vv], &self.dual.coev);
                            let braided = sp.apply_at(&[e, o, vv], 0, 2, sigma, &[o, e], &t);
                            let s3 = sp.space(&[o, e, vv]);
                            for (r3, c3) in braided.iter().enumerate() {
                                if c3.is_zero() {
                                    continue;
                                }
                                let w3 = s3.word(r3);
                                let oe = sp.project_word(&[o, e], &w3[..2]);
                                for r in 0..=k + 1 {
                                    let uw = self.bullet_vec(1, &linalg::unit(dv, w3[2]), k, &ww, r);
                                    linalg::axpy(&mut rhs[r], &(c * c3), &sp.tensor(&[o, e], &oe, &self.vec_n(r), &uw));
                                }
                            }
                        }
                    }
                    if lhs != rhs {
                        return Err(format!("(id⊗ϑ)∇ != ∇ϑ for {} at v = {n}:{i}, e{l}", m.name));
                    }
                }
            }
        }
        Ok(())
    }
}
