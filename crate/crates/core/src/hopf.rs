//! Finite-dimensional Hopf algebras given by structure tensors, their module categories,
//! and the centre object `(H, ad)` with `φ_V(h⊗v) = h₍₁₎▷v ⊗ h₍₂₎`.
//!
//! Every map is a matrix on Kronecker-ordered bases: the basis vector `x_i ⊗ y_j` of
//! `X ⊗ Y` has index `i·dim Y + j`.

use crate::centre::{CentreCandidate, Check};
use crate::linalg::{inverse, Mat};
use crate::scalar::Scalar;

/// The swap `X ⊗ Y → Y ⊗ X`.
pub fn swap(dx: usize, dy: usize) -> Mat {
    let mut p = Mat::zeros(dx * dy, dx * dy);
    for i in 0..dx {
        for j in 0..dy {
            p.set(j * dx + i, i * dy + j, Scalar::ONE);
        }
    }
    p
}

fn id(n: usize) -> Mat {
    Mat::identity(n)
}

fn compare(what: &str, lhs: &Mat, rhs: &Mat) -> Check {
    match lhs.first_difference(rhs) {
        None => Ok(()),
        Some((r, c)) => Err(format!("{what}: entry ({r}, {c}) is {} on the left, {} on the right", lhs.get(r, c), rhs.get(r, c))),
    }
}

#[derive(Clone, Debug)]
pub struct HopfAlgebra {
    pub name: String,
    pub dim: usize,
    /// `μ: H⊗H → H`.
    pub mul: Mat,
    /// `η: k → H`.
    pub unit: Mat,
    /// `Δ: H → H⊗H`.
    pub comul: Mat,
    /// `ε: H → k`.
    pub counit: Mat,
    pub antipode: Mat,
}

/// A left `H`-module, `ρ: H⊗V → V`.
#[derive(Clone, Debug)]
pub struct HModule {
    pub name: String,
    pub dim: usize,
    pub action: Mat,
}

impl HopfAlgebra {
    /// The group algebra `k[G]` of a group given by its multiplication table.
    pub fn group_algebra(name: &str, table: &[Vec<usize>]) -> HopfAlgebra {
        let n = table.len();
        let e = (0..n).find(|&i| (0..n).all(|j| table[i][j] == j)).expect("group has an identity");
        let inv = |g: usize| (0..n).find(|&h| table[g][h] == e).expect("group elements are invertible");
        let mut mul = Mat::zeros(n, n * n);
        let mut comul = Mat::zeros(n * n, n);
        let mut antipode = Mat::zeros(n, n);
        for g in 0..n {
            for h in 0..n {
                mul.set(table[g][h], g * n + h, Scalar::ONE);
            }
            comul.set(g * n + g, g, Scalar::ONE);
            antipode.set(inv(g), g, Scalar::ONE);
        }
        let mut unit = Mat::zeros(n, 1);
        unit.set(e, 0, Scalar::ONE);
        let counit = Mat::from_rows(vec![vec![Scalar::ONE; n]], n);
        HopfAlgebra { name: name.into(), dim: n, mul, unit, comul, counit, antipode }
    }

    /// Associativity, coassociativity, (co)unit laws, `Δ` an algebra map and the antipode law.
    pub fn validate(&self) -> Check {
        let n = self.dim;
        compare("associativity", &self.mul.mul(&self.mul.kron(&id(n))), &self.mul.mul(&id(n).kron(&self.mul)))?;
        compare("left unit", &self.mul.mul(&self.unit.kron(&id(n))), &id(n))?;
        compare("right unit", &self.mul.mul(&id(n).kron(&self.unit)), &id(n))?;
        compare("coassociativity", &self.comul.kron(&id(n)).mul(&self.comul), &id(n).kron(&self.comul).mul(&self.comul))?;
        compare("left counit", &self.counit.kron(&id(n)).mul(&self.comul), &id(n))?;
        compare("right counit", &id(n).kron(&self.counit).mul(&self.comul), &id(n))?;
        let mid = id(n).kron(&swap(n, n)).kron(&id(n));
        let delta_mul = self.mul.kron(&self.mul).mul(&mid).mul(&self.comul.kron(&self.comul));
        compare("Δ multiplicative", &self.comul.mul(&self.mul), &delta_mul)?;
        let eta_eps = self.unit.mul(&self.counit);
        compare("antipode (S⊗id)", &self.mul.mul(&self.antipode.kron(&id(n))).mul(&self.comul), &eta_eps)?;
        compare("antipode (id⊗S)", &self.mul.mul(&id(n).kron(&self.antipode)).mul(&self.comul), &eta_eps)
    }

    /// `g▷h = g₍₁₎ h S(g₍₂₎)`.
    pub fn adjoint(&self) -> HModule {
        let n = self.dim;
        let a = self.mul.mul(&self.mul.kron(&id(n))).mul(&id(n).kron(&id(n)).kron(&self.antipode)).mul(&id(n).kron(&swap(n, n))).mul(&self.comul.kron(&id(n)));
        HModule { name: "H_ad".into(), dim: n, action: a }
    }

    pub fn regular(&self) -> HModule {
        HModule { name: "H_reg".into(), dim: self.dim, action: self.mul.clone() }
    }

    pub fn trivial(&self) -> HModule {
        HModule { name: "k".into(), dim: 1, action: self.counit.clone() }
    }

    /// A one-dimensional module from a character `χ: H → k`.
    pub fn character(&self, name: &str, values: &[i64]) -> HModule {
        HModule { name: name.into(), dim: 1, action: Mat::from_rows(vec![values.iter().map(|&v| Scalar::from_int(v)).collect()], self.dim) }
    }

    /// `h▷(v⊗w) = h₍₁₎▷v ⊗ h₍₂₎▷w`.
    pub fn tensor(&self, v: &HModule, w: &HModule) -> HModule {
        let n = self.dim;
        let shuffle = id(n).kron(&swap(n, v.dim)).kron(&id(w.dim));
        let a = v.action.kron(&w.action).mul(&shuffle).mul(&self.comul.kron(&id(v.dim * w.dim)));
        HModule { name: format!("{}⊗{}", v.name, w.name), dim: v.dim * w.dim, action: a }
    }

    /// `ρ(μ⊗id) = ρ(id⊗ρ)` and `ρ(η⊗id) = id`.
    pub fn validate_module(&self, v: &HModule) -> Check {
        let n = self.dim;
        compare(&format!("{} associativity", v.name), &v.action.mul(&self.mul.kron(&id(v.dim))), &v.action.mul(&id(n).kron(&v.action)))?;
        compare(&format!("{} unit", v.name), &v.action.mul(&self.unit.kron(&id(v.dim))), &id(v.dim))
    }

    /// `T ρ_V = ρ_W (id⊗T)`.
    pub fn is_module_map(&self, t: &Mat, v: &HModule, w: &HModule) -> Check {
        compare(&format!("{} → {} module map", v.name, w.name), &t.mul(&v.action), &w.action.mul(&id(self.dim).kron(t)))
    }

    /// `φ_V(h⊗v) = h₍₁₎▷v ⊗ h₍₂₎ : H⊗V → V⊗H`.
    pub fn crossing(&self, v: &HModule) -> Mat {
        let n = self.dim;
        v.action.kron(&id(n)).mul(&id(n).kron(&swap(n, v.dim))).mul(&self.comul.kron(&id(v.dim)))
    }

    /// `φ_V⁻¹(v⊗h) = h₍₂₎ ⊗ S⁻¹(h₍₁₎)▷v : V⊗H → H⊗V`.
    pub fn crossing_inverse(&self, v: &HModule) -> Option<Mat> {
        let n = self.dim;
        let s_inv = inverse(&self.antipode)?;
        let m = id(n)
            .kron(&v.action)
            .mul(&id(n).kron(&s_inv).kron(&id(v.dim)))
            .mul(&swap(n, n).kron(&id(v.dim)))
            .mul(&swap(v.dim, n * n))
            .mul(&id(v.dim).kron(&self.comul));
        Some(m)
    }
}

/// The centre candidate `(H, ad, φ, μ, η)` tested on a list of modules.
pub struct HopfCentre {
    pub h: HopfAlgebra,
    pub x: HModule,
    pub modules: Vec<HModule>,
    pub maps: Vec<(String, Mat, usize, usize)>,
}

impl HopfCentre {
    pub fn new(h: HopfAlgebra, modules: Vec<HModule>, maps: Vec<(String, Mat, usize, usize)>) -> HopfCentre {
        let x = h.adjoint();
        HopfCentre { h, x, modules, maps }
    }

    /// `ℤ₂ = {e, s}` with the trivial, sign, regular and adjoint modules; `ε: H_reg → k`.
    pub fn z2() -> HopfCentre {
        let h = HopfAlgebra::group_algebra("ℚ[ℤ₂]", &[vec![0, 1], vec![1, 0]]);
        let modules = vec![h.trivial(), h.character("sign", &[1, -1]), h.regular(), h.adjoint()];
        let maps = vec![("ε".to_string(), h.counit.clone(), 2, 0), ("ε".to_string(), h.counit.clone(), 3, 0)];
        HopfCentre::new(h, modules, maps)
    }

    /// `S₃` as permutations of `{0, 1, 2}` in lexicographic order, with the trivial, sign,
    /// permutation and adjoint modules; `ε: H_ad → k` and the sum map `ℚ³ → k`.
    pub fn s3() -> HopfCentre {
        let perms = permutations3();
        let index = |p: &[usize; 3]| perms.iter().position(|q| q == p).expect("closed under composition");
        let table: Vec<Vec<usize>> = perms.iter().map(|g| perms.iter().map(|h| index(&[g[h[0]], g[h[1]], g[h[2]]])).collect()).collect();
        let h = HopfAlgebra::group_algebra("ℚ[S₃]", &table);
        let signs: Vec<i64> = perms.iter().map(sign3).collect();
        let mut perm_action = Mat::zeros(3, 18);
        for (g, p) in perms.iter().enumerate() {
            for i in 0..3 {
                perm_action.set(p[i], g * 3 + i, Scalar::ONE);
            }
        }
        let perm = HModule { name: "ℚ³".into(), dim: 3, action: perm_action };
        let modules = vec![h.trivial(), h.character("sign", &signs), perm, h.adjoint()];
        let sum = Mat::from_rows(vec![vec![Scalar::ONE; 3]], 3);
        let maps = vec![("ε".to_string(), h.counit.clone(), 3, 0), ("Σ".to_string(), sum, 2, 0)];
        HopfCentre::new(h, modules, maps)
    }

    /// `h▷v = (id⊗ε)φ_V(h⊗v)` recovers the action.
    pub fn action_from_crossing(&self, v: &HModule) -> Check {
        compare(&format!("(id⊗ε)φ on {}", v.name), &id(v.dim).kron(&self.h.counit).mul(&self.h.crossing(v)), &v.action)
    }
}

fn permutations3() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a != b && b != c && a != c {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn sign3(p: &[usize; 3]) -> i64 {
    let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl CentreCandidate for HopfCentre {
    fn name(&self) -> String {
        format!("({}, ad)", self.h.name)
    }

    fn objects(&self) -> Vec<String> {
        self.modules.iter().map(|m| m.name.clone()).collect()
    }

    fn morphisms(&self) -> Vec<String> {
        self.maps.iter().map(|(l, _, s, t)| format!("{l}: {} → {}", self.modules[*s].name, self.modules[*t].name)).collect()
    }

    fn crossing_is_morphism(&self, e: usize) -> Check {
        let v = &self.modules[e];
        self.h.validate_module(v)?;
        let src = self.h.tensor(&self.x, v);
        let dst = self.h.tensor(v, &self.x);
        self.h.is_module_map(&self.h.crossing(v), &src, &dst)?;
        self.action_from_crossing(v)
    }

    fn crossing_invertible(&self, e: usize) -> Check {
        let v = &self.modules[e];
        let phi = self.h.crossing(v);
        let inv = self.h.crossing_inverse(v).ok_or("antipode is not invertible")?;
        let n = self.h.dim * v.dim;
        compare(&format!("φ⁻¹φ on {}", v.name), &inv.mul(&phi), &id(n))?;
        compare(&format!("φφ⁻¹ on {}", v.name), &phi.mul(&inv), &id(n))
    }

    fn tensor_compatible(&self, e: usize, f: usize) -> Check {
        let (v, w) = (&self.modules[e], &self.modules[f]);
        let vw = self.h.tensor(v, w);
        let lhs = self.h.crossing(&vw);
        let rhs = id(v.dim).kron(&self.h.crossing(w)).mul(&self.h.crossing(v).kron(&id(w.dim)));
        compare(&format!("φ_({}) vs (id⊗φ)(φ⊗id)", vw.name), &lhs, &rhs)
    }

    fn unit_object(&self) -> Check {
        compare("φ_k", &self.h.crossing(&self.h.trivial()), &id(self.h.dim))
    }

    fn natural(&self, t: usize) -> Check {
        let (label, m, s, d) = &self.maps[t];
        let (v, w) = (&self.modules[*s], &self.modules[*d]);
        self.h.is_module_map(m, v, w)?;
        let n = self.h.dim;
        compare(&format!("naturality of φ along {label}"), &self.h.crossing(w).mul(&id(n).kron(m)), &m.kron(&id(n)).mul(&self.h.crossing(v)))
    }

    fn product_is_morphism(&self) -> Option<Check> {
        let xx = self.h.tensor(&self.x, &self.x);
        Some(self.h.validate().and_then(|_| self.h.is_module_map(&self.h.mul, &xx, &self.x)))
    }

    fn product_compatible(&self, e: usize) -> Option<Check> {
        let v = &self.modules[e];
        let n = self.h.dim;
        let phi = self.h.crossing(v);
        let lhs = phi.mul(&self.h.mul.kron(&id(v.dim)));
        let rhs = id(v.dim).kron(&self.h.mul).mul(&phi.kron(&id(n))).mul(&id(n).kron(&phi));
        Some(compare(&format!("φ(μ⊗id) on {}", v.name), &lhs, &rhs))
    }

    fn unit_compatible(&self, e: usize) -> Option<Check> {
        let v = &self.modules[e];
        let lhs = self.h.crossing(v).mul(&self.h.unit.kron(&id(v.dim)));
        Some(compare(&format!("φ(η⊗id) on {}", v.name), &lhs, &id(v.dim).kron(&self.h.unit)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::centre::centre_verify;

    #[test]
    fn swap_is_involutive() {
        assert_eq!(swap(2, 3).mul(&swap(3, 2)), Mat::identity(6));
    }

    #[test]
    fn s3_table_is_a_group() {
        let c = HopfCentre::s3();
        assert_eq!(c.h.validate(), Ok(()));
        assert_eq!(c.h.dim, 6);
    }

    #[test]
    fn z2_adjoint_action_is_trivial() {
        let c = HopfCentre::z2();
        let ad = c.h.adjoint();
        let expect = Mat::from_fn_cols(2, 4, |col| linalg::unit(2, col % 2));
        assert_eq!(ad.action, expect);
    }

    #[test]
    fn crossing_on_sign_module() {
        // φ(s⊗1) = s▷1 ⊗ s = −1⊗s.
        let c = HopfCentre::z2();
        let phi = c.h.crossing(&c.modules[1]);
        assert_eq!(phi.col(1), vec![Scalar::ZERO, Scalar::from_int(-1)]);
    }

    #[test]
    fn both_groups_pass() {
        for c in [HopfCentre::z2(), HopfCentre::s3()] {
            let r = centre_verify(&c);
            assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        }
    }
}
