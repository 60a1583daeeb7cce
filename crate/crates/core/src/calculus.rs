//! The right connection on forms, the dual left connection on vector fields, and
//! their extensions to tensor powers.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::linalg::{self, Mat, Vector};

type Check = std::result::Result<(), String>;

impl Geometry {
    /// `□(ξ·a) = □ξ·a + ξ⊗da` and `□(a·ξ) = a·□ξ + σ⁻¹(da⊗ξ)`.
    pub(crate) fn check_box_leibniz(&self) -> Result<()> {
        let sp = &self.spaces;
        let alg = self.algebra();
        let (o, oo) = ([self.omega], [self.omega, self.omega]);
        let de = self.dim(&o);
        for j in 0..de {
            let xi = linalg::unit(de, j);
            let bx = self.box_.col(j);
            for i in 0..alg.dim() {
                let a = alg.basis(i);
                let da = self.d_of(&a);
                let lhs = self.box_.mul_vec(&sp.right_act(&o, &xi, &a));
                let rhs = linalg::add(&sp.right_act(&oo, &bx, &a), &sp.tensor(&o, &xi, &o, &da));
                if lhs != rhs {
                    return Err(Error::validation("box-leibniz", format!("□(ξ{j}·{}) != □ξ{j}·{} + ξ{j}⊗d{}", alg.names[i], alg.names[i], alg.names[i])));
                }
                let lhs = self.box_.mul_vec(&sp.left_act(&o, &a, &xi));
                let rhs = linalg::add(&sp.left_act(&oo, &a, &bx), &self.sigma_inv.mul_vec(&sp.tensor(&o, &da, &o, &xi)));
                if lhs != rhs {
                    return Err(Error::validation("box-leibniz", format!("□({}·ξ{j}) != {}·□ξ{j} + σ⁻¹(d{}⊗ξ{j})", alg.names[i], alg.names[i], alg.names[i])));
                }
            }
        }
        Ok(())
    }

    /// Replaces `□` without the Leibniz check, for fault injection: the verification
    /// suites then have to catch what loading would have rejected. Must be called
    /// before anything derived from `□` is cached.
    pub fn inject_box_unchecked(&mut self, box_: Mat) {
        self.box_ = box_;
        self.box_vec = self.build_box_vec();
    }

    /// `□v = d(v(ξ))⊗u − (ev⊗id⊗id)(v⊗□ξ⊗u)` with `coev(1) = ξ⊗u`.
    pub(crate) fn build_box_vec(&self) -> Mat {
        let sp = &self.spaces;
        let (o, v) = (self.omega, self.vec);
        let coev_space = sp.space(&[o, v]);
        let dv = self.dim(&[v]);
        let (dom, dvv) = (self.dim(&[o]), dv);
        Mat::from_fn_cols(self.dim(&[o, v]), dv, |i| {
            let mut out = linalg::zeros(self.dim(&[o, v]));
            let ev_i = linalg::unit(dvv, i);
            for (q, c) in self.dual.coev.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let w = coev_space.word(q);
                let (xi, u) = (linalg::unit(dom, w[0]), linalg::unit(dv, w[1]));
                let val = self.dual.funcs[i].col(w[0]);
                linalg::axpy(&mut out, c, &sp.tensor(&[o], &self.d_of(&val), &[v], &u));
                let inner = sp.tensor(&[o, o], &self.box_.mul_vec(&xi), &[v], &u);
                let t = sp.tensor(&[v], &ev_i, &[o, o, v], &inner);
                let r = sp.apply_at(&[v, o, o, v], 0, 2, &self.dual.ev, &[], &t);
                linalg::axpy(&mut out, &-c.clone(), &r);
            }
            out
        })
    }

    /// `σ(v⊗ξ) = (ev⊗id⊗id)(v⊗σ⁻¹(ξ⊗coev(1)))`.
    pub(crate) fn build_sigma_vec(&self) -> Mat {
        let sp = &self.spaces;
        let (o, v) = (self.omega, self.vec);
        let src = [v, o];
        Mat::from_fn_cols(self.dim(&[o, v]), self.dim(&src), |q| {
            let x = sp.tensor(&src, &linalg::unit(self.dim(&src), q), &[o, v], &self.dual.coev);
            let y = sp.apply_at(&[v, o, o, v], 1, 3, &self.sigma_inv, &[o, o], &x);
            sp.apply_at(&[v, o, o, v], 0, 2, &self.dual.ev, &[], &y)
        })
    }

    /// `d∘ev = (id⊗ev)(□⊗id) + (ev⊗id)(id⊗□)` on `Vec ⊗_A Ω¹`.
    pub fn check_duality(&self) -> Check {
        self.check_ev_n_leibniz(1)
    }

    /// `d∘ev⟨n⟩ = (id⊗ev⟨n⟩)(□⟨n⟩⊗id) + (ev⟨n⟩⊗id)(id⊗□⟨n⟩)`.
    pub fn check_ev_n_leibniz(&self, n: usize) -> Check {
        let sp = &self.spaces;
        let (vn, on) = (self.vec_n(n), self.omega_n(n));
        let src: Vec<_> = vn.iter().chain(&on).copied().collect();
        let s = sp.space(&src);
        let evn = self.ev_n(n);
        let (bf, bo) = (self.box_fields(n), self.box_forms(n));
        let o1 = [self.omega];
        let left_src: Vec<_> = o1.iter().chain(&vn).chain(&on).copied().collect();
        let right_src: Vec<_> = vn.iter().chain(&self.omega_n(n + 1)).copied().collect();
        let o1vn: Vec<_> = o1.iter().chain(&vn).copied().collect();
        for q in 0..s.dim() {
            let w = s.word(q).to_vec();
            let v = sp.project_word(&vn, &w[..n]);
            let beta = sp.project_word(&on, &w[n..]);
            let lhs = self.d_of(&evn.col(q));
            let t1 = sp.tensor(&o1vn, &bf.mul_vec(&v), &on, &beta);
            let r1 = sp.apply_at(&left_src, 1, 1 + 2 * n, &evn, &[], &t1);
            let t2 = sp.tensor(&vn, &v, &self.omega_n(n + 1), &bo.mul_vec(&beta));
            let r2 = sp.apply_at(&right_src, 0, 2 * n, &evn, &[], &t2);
            if lhs != linalg::add(&r1, &r2) {
                return Err(format!("n = {n}, basis word {:?} of {}", w, sp.list_name(&src)));
            }
        }
        Ok(())
    }

    /// Leibniz rules of the dual connection and the relation
    /// `(id⊗ev)(σ⊗id) = (ev⊗id)(id⊗σ⁻¹)`.
    pub fn check_dual_connection(&self) -> Check {
        let sp = &self.spaces;
        let alg = self.algebra();
        let (o, v) = (self.omega, self.vec);
        let dv = self.dim(&[v]);
        for i in 0..dv {
            let e = linalg::unit(dv, i);
            let be = self.box_vec.col(i);
            for k in 0..alg.dim() {
                let a = alg.basis(k);
                let da = self.d_of(&a);
                let lhs = self.box_vec.mul_vec(&sp.right_act(&[v], &e, &a));
                let rhs = linalg::add(&sp.right_act(&[o, v], &be, &a), &self.sigma_vec.mul_vec(&sp.tensor(&[v], &e, &[o], &da)));
                if lhs != rhs {
                    return Err(format!("□(v{i}·{0}) != □v{i}·{0} + σ(v{i}⊗d{0})", alg.names[k]));
                }
                let lhs = self.box_vec.mul_vec(&sp.left_act(&[v], &a, &e));
                let rhs = linalg::add(&sp.left_act(&[o, v], &a, &be), &sp.tensor(&[o], &da, &[v], &e));
                if lhs != rhs {
                    return Err(format!("□({0}·v{i}) != {0}·□v{i} + d{0}⊗v{i}", alg.names[k]));
                }
            }
        }
        let src = [v, o, o];
        let lhs = {
            let t = sp.whisker(&src, 0, 2, &self.sigma_vec, &[o, v]);
            sp.whisker(&[o, v, o], 1, 3, &self.dual.ev, &[]).mul(&t)
        };
        let rhs = {
            let t = sp.whisker(&src, 1, 3, &self.sigma_inv, &[o, o]);
            sp.whisker(&src, 0, 2, &self.dual.ev, &[]).mul(&t)
        };
        if let Some((r, c)) = lhs.first_difference(&rhs) {
            return Err(format!("(id⊗ev)(σ⊗id) != (ev⊗id)(id⊗σ⁻¹) at entry ({r}, {c})"));
        }
        Ok(())
    }

    /// `ev⟨n⟩: Vec^{⊗n} ⊗_A (Ω¹)^{⊗n} → A`, pairing innermost factors first.
    pub fn ev_n(&self, n: usize) -> Arc<Mat> {
        self.memo_ev.get_or(&n, || match n {
            0 => Mat::identity(self.algebra().dim()),
            1 => self.dual.ev.clone(),
            _ => {
                let src: Vec<_> = self.vec_n(n).into_iter().chain(self.omega_n(n)).collect();
                let inner = self.ev_n(n - 1);
                let w = self.spaces.whisker(&src, 1, 2 * n - 1, &inner, &[]);
                self.dual.ev.mul(&w)
            }
        })
    }

    /// `coev⟨n⟩(1) ∈ (Ω¹)^{⊗n} ⊗_A Vec^{⊗n}`.
    pub fn coev_n(&self, n: usize) -> Arc<Vector> {
        self.memo_coev.get_or(&n, || {
            let sp = &self.spaces;
            let (o, v) = (self.omega, self.vec);
            match n {
                0 => self.algebra().unit().clone(),
                1 => self.dual.coev.clone(),
                _ => {
                    let inner = self.coev_n(n - 1);
                    let mid: Vec<_> = self.omega_n(n - 1).into_iter().chain(self.vec_n(n - 1)).collect();
                    let om: Vec<_> = [o].iter().chain(&mid).copied().collect();
                    let target: Vec<_> = om.iter().chain(&[v]).copied().collect();
                    let cs = sp.space(&[o, v]);
                    let mut out = linalg::zeros(self.dim(&target));
                    for (q, c) in self.dual.coev.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let w = cs.word(q);
                        let x = sp.tensor(&[o], &linalg::unit(self.dim(&[o]), w[0]), &mid, &inner);
                        let y = sp.tensor(&om, &x, &[v], &linalg::unit(self.dim(&[v]), w[1]));
                        linalg::axpy(&mut out, c, &y);
                    }
                    out
                }
            }
        })
    }

    /// `□⟨n⟩: (Ω¹)^{⊗n} → (Ω¹)^{⊗(n+1)}` with `□⟨0⟩ = d`, `□⟨1⟩ = □` and
    /// `□⟨n+1⟩ = id^n⊗□ + (id^n⊗σ⁻¹)(□⟨n⟩⊗id)`.
    pub fn box_forms(&self, n: usize) -> Arc<Mat> {
        self.memo_box_forms.get_or(&n, || match n {
            0 => self.d.clone(),
            1 => self.box_.clone(),
            _ => {
                let sp = &self.spaces;
                let o = [self.omega];
                let (prev_list, src, out_list) = (self.omega_n(n - 1), self.omega_n(n), self.omega_n(n + 1));
                let prev = self.box_forms(n - 1);
                let s = sp.space(&src);
                let dom = self.dim(&o);
                Mat::from_fn_cols(self.dim(&out_list), s.dim(), |q| {
                    let w = s.word(q).to_vec();
                    let beta = sp.project_word(&prev_list, &w[..n - 1]);
                    let alpha = linalg::unit(dom, w[n - 1]);
                    let t1 = sp.tensor(&prev_list, &beta, &[self.omega, self.omega], &self.box_.mul_vec(&alpha));
                    let x = sp.tensor(&src, &prev.mul_vec(&beta), &o, &alpha);
                    let t2 = sp.apply_at(&out_list, n - 1, n + 1, &self.sigma_inv, &[self.omega, self.omega], &x);
                    linalg::add(&t1, &t2)
                })
            }
        })
    }

    /// `□⟨n⟩: Vec^{⊗n} → Ω¹ ⊗ Vec^{⊗n}` with `□⟨0⟩ = d`, `□⟨1⟩ = □` and
    /// `□⟨n+1⟩ = □⊗id^n + (σ⊗id^n)(id⊗□⟨n⟩)`.
    pub fn box_fields(&self, n: usize) -> Arc<Mat> {
        self.memo_box_fields.get_or(&n, || match n {
            0 => self.d.clone(),
            1 => self.box_vec.clone(),
            _ => {
                let sp = &self.spaces;
                let (o, v) = (self.omega, self.vec);
                let rest = self.vec_n(n - 1);
                let prev = self.box_fields(n - 1);
                let src = self.vec_n(n);
                let s = sp.space(&src);
                let ov: Vec<_> = [o].iter().chain(&rest).copied().collect();
                let vov: Vec<_> = [v, o].iter().chain(&rest).copied().collect();
                let target: Vec<_> = [o, v].iter().chain(&rest).copied().collect();
                let dv = self.dim(&[v]);
                Mat::from_fn_cols(self.dim(&target), s.dim(), |q| {
                    let w = s.word(q).to_vec();
                    let u = linalg::unit(dv, w[0]);
                    let r = sp.project_word(&rest, &w[1..]);
                    let t1 = sp.tensor(&[o, v], &self.box_vec.col(w[0]), &rest, &r);
                    let x = sp.tensor(&[v], &u, &ov, &prev.mul_vec(&r));
                    let t2 = sp.apply_at(&vov, 0, 2, &self.sigma_vec, &[o, v], &x);
                    linalg::add(&t1, &t2)
                })
            }
        })
    }

    /// `(ev⟨n⟩⊗id)(v⊗coev⟨n⟩(1)) = v` and `(id⊗ev⟨n⟩)(coev⟨n⟩(1)⊗β) = β` on bases.
    pub fn check_zigzag_n(&self, n: usize) -> Check {
        let sp = &self.spaces;
        let (vn, on) = (self.vec_n(n), self.omega_n(n));
        let c = self.coev_n(n);
        let evn = self.ev_n(n);
        let ov: Vec<_> = on.iter().chain(&vn).copied().collect();
        let vov: Vec<_> = vn.iter().chain(&ov).copied().collect();
        let ovo: Vec<_> = ov.iter().chain(&on).copied().collect();
        let dvn = self.dim(&vn);
        for i in 0..dvn {
            let v = linalg::unit(dvn, i);
            let t = sp.tensor(&vn, &v, &ov, &c);
            if sp.apply_at(&vov, 0, 2 * n, &evn, &[], &t) != v {
                return Err(format!("(ev⟨{n}⟩⊗id)(v⊗coev⟨{n}⟩(1)) != v at basis vector {i} of {}", sp.list_name(&vn)));
            }
        }
        let don = self.dim(&on);
        for i in 0..don {
            let b = linalg::unit(don, i);
            let t = sp.tensor(&ov, &c, &on, &b);
            if sp.apply_at(&ovo, n, 3 * n, &evn, &[], &t) != b {
                return Err(format!("(id⊗ev⟨{n}⟩)(coev⟨{n}⟩(1)⊗β) != β at basis vector {i} of {}", sp.list_name(&on)));
            }
        }
        Ok(())
    }

    /// The coevaluation element is invariant: `a·coev(1) = coev(1)·a`.
    pub fn check_coev_central(&self) -> Check {
        let sp = &self.spaces;
        let list = [self.omega, self.vec];
        for k in 0..self.algebra().dim() {
            let a = self.algebra().basis(k);
            if sp.left_act(&list, &a, &self.dual.coev) != sp.right_act(&list, &self.dual.coev, &a) {
                return Err(format!("{}·coev(1) != coev(1)·{}", self.algebra().names[k], self.algebra().names[k]));
            }
        }
        Ok(())
    }
}
