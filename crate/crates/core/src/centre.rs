//! A generic verifier for objects of the centre of a monoidal category, and the
//! candidate `(𝒯Vec A_•, ϑ)` in the category of bimodules with bimodule connections.
//!
//! A candidate supplies the individual axiom checks; [`centre_verify`] decides which
//! ones to run over the candidate's test objects and morphisms and collects the outcome.
//! The Hopf-algebra candidate in [`crate::hopf`] goes through the same engine.

use std::sync::Arc;

use serde::Serialize;

use crate::connection::ConnectionModule;
use crate::error::Result;
use crate::geometry::Geometry;
use crate::linalg::{self, Mat, Vector};

pub type Check = std::result::Result<(), String>;

pub trait CentreCandidate {
    fn name(&self) -> String;
    fn objects(&self) -> Vec<String>;
    /// Labels of the test morphisms `T: E → F`.
    fn morphisms(&self) -> Vec<String>;
    /// `φ_E` is a morphism of the underlying category.
    fn crossing_is_morphism(&self, e: usize) -> Check;
    /// `φ_E` is invertible, with the stated inverse where there is one.
    fn crossing_invertible(&self, e: usize) -> Check;
    /// `φ_{E⊗F} = (id_E⊗φ_F)(φ_E⊗id_F)`.
    fn tensor_compatible(&self, e: usize, f: usize) -> Check;
    /// `φ_1` is the canonical identification `X⊗1 ≅ 1⊗X`.
    fn unit_object(&self) -> Check;
    /// `T` is a morphism and `(T⊗id)φ_E = φ_F(id⊗T)`.
    fn natural(&self, t: usize) -> Check;
    /// The product `μ: X⊗X → X` is a morphism, if the candidate has one.
    fn product_is_morphism(&self) -> Option<Check>;
    /// `φ_E(μ⊗id) = (id_E⊗μ)(φ_E⊗id)(id⊗φ_E)`.
    fn product_compatible(&self, e: usize) -> Option<Check>;
    /// `φ_E(η⊗id) = id⊗η` for the unit `η: 1 → X`.
    fn unit_compatible(&self, e: usize) -> Option<Check>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomOutcome {
    pub axiom: String,
    pub subject: String,
    /// `None` on success; the witness otherwise.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CentreReport {
    pub candidate: String,
    pub outcomes: Vec<AxiomOutcome>,
}

impl CentreReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.witness.is_none())
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomOutcome> {
        self.outcomes.iter().filter(|o| o.witness.is_some())
    }
}

/// Runs every centre axiom of `c` on its test objects, pairs of test objects and test morphisms.
pub fn centre_verify(c: &dyn CentreCandidate) -> CentreReport {
    let objects = c.objects();
    let mut outcomes = Vec::new();
    let mut push = |axiom: &str, subject: String, r: Check| outcomes.push(AxiomOutcome { axiom: axiom.into(), subject, witness: r.err() });
    push("unit-object", "1".into(), c.unit_object());
    for (i, name) in objects.iter().enumerate() {
        push("morphism", name.clone(), c.crossing_is_morphism(i));
        push("invertible", name.clone(), c.crossing_invertible(i));
        if let Some(r) = c.product_compatible(i) {
            push("product-crossing", name.clone(), r);
        }
        if let Some(r) = c.unit_compatible(i) {
            push("unit-crossing", name.clone(), r);
        }
    }
    for (i, e) in objects.iter().enumerate() {
        for (j, f) in objects.iter().enumerate() {
            push("tensor", format!("{e} ⊗ {f}"), c.tensor_compatible(i, j));
        }
    }
    for (t, label) in c.morphisms().into_iter().enumerate() {
        push("natural", label, c.natural(t));
    }
    if let Some(r) = c.product_is_morphism() {
        push("product-morphism", "μ".into(), r);
    }
    CentreReport { candidate: c.name(), outcomes }
}

/// `(𝒯Vec A_•, ϑ)` over a geometry, truncated at the geometry's degree.
pub struct OperatorCentre<'g> {
    pub g: &'g Geometry,
    pub objects: Vec<Arc<ConnectionModule>>,
    pub morphisms: Vec<TestMorphism>,
}

pub struct TestMorphism {
    pub label: String,
    pub map: Mat,
    pub source: Arc<ConnectionModule>,
    pub target: Arc<ConnectionModule>,
}

impl<'g> OperatorCentre<'g> {
    /// Test objects `A, Ω¹, Vec A, Ω¹⊗_AΩ¹` (only `A` when `Ω¹ = 0`). Test morphisms are
    /// the central element `2·1` acting on each object, `ev: Vec⊗_AΩ¹ → A` and
    /// `a ↦ a·coev(1): A → Ω¹⊗_A Vec`.
    pub fn standard(g: &'g Geometry) -> Result<OperatorCentre<'g>> {
        let mut objects = vec![g.connection_on(&[g.a])?];
        if g.dim(&[g.omega]) > 0 {
            objects.push(g.connection_on(&[g.omega])?);
            objects.push(g.connection_on(&[g.vec])?);
            objects.push(g.connection_on(&[g.omega, g.omega])?);
        }
        let two = crate::scalar::Scalar::from_int(2);
        let mut morphisms: Vec<TestMorphism> = objects
            .iter()
            .map(|m| TestMorphism { label: format!("2·id on {}", m.name), map: Mat::identity(m.dim(g)).scale(&two), source: m.clone(), target: m.clone() })
            .collect();
        if objects.len() > 1 {
            let sp = &g.spaces;
            let alg = g.algebra();
            let a = objects[0].clone();
            let vo = g.connection_on(&[g.vec, g.omega])?;
            let ev = g.dual.ev.mul(&sp.regroup(&[vo.atom], &[g.vec, g.omega]));
            morphisms.push(TestMorphism { label: format!("ev: {} → A", vo.name), map: ev, source: vo, target: a.clone() });
            let ov = g.connection_on(&[g.omega, g.vec])?;
            let c = sp.regroup(&[g.omega, g.vec], &[ov.atom]).mul_vec(&g.dual.coev);
            let coev = Mat::from_fn_cols(ov.dim(g), alg.dim(), |i| sp.left_act(&[ov.atom], &alg.basis(i), &c));
            morphisms.push(TestMorphism { label: format!("coev: A → {}", ov.name), map: coev, source: a, target: ov });
        }
        Ok(OperatorCentre { g, objects, morphisms })
    }

    fn err(e: crate::error::Error) -> String {
        e.to_string()
    }
}

impl CentreCandidate for OperatorCentre<'_> {
    fn name(&self) -> String {
        format!("𝒯Vec A_• over {} (degree ≤ {})", self.g.name, self.g.degree)
    }

    fn objects(&self) -> Vec<String> {
        self.objects.iter().map(|m| m.name.clone()).collect()
    }

    fn morphisms(&self) -> Vec<String> {
        self.morphisms.iter().map(|t| t.label.clone()).collect()
    }

    /// `ϑ_E` is a bimodule map for the `•` right action, intertwines the connections, and
    /// both sides carry the zero generalised braiding.
    fn crossing_is_morphism(&self, e: usize) -> Check {
        let m = &self.objects[e];
        for n in 0..=self.g.degree {
            self.g.check_theta_module_properties(m, n)?;
        }
        self.g.check_theta_morphism(m, self.g.degree)
    }

    fn crossing_invertible(&self, e: usize) -> Check {
        let m = &self.objects[e];
        for n in 0..=self.g.degree {
            self.g.check_theta_top_block(m, n)?;
            self.g.check_theta_inverse(m, n)?;
        }
        Ok(())
    }

    fn tensor_compatible(&self, e: usize, f: usize) -> Check {
        let (e, f) = (&self.objects[e], &self.objects[f]);
        for n in 0..=self.g.degree {
            self.g.check_theta_factorization(e, f, n)?;
        }
        Ok(())
    }

    fn unit_object(&self) -> Check {
        (0..=self.g.degree).try_for_each(|n| self.g.check_theta_algebra(n))
    }

    fn natural(&self, t: usize) -> Check {
        let t = &self.morphisms[t];
        self.g.check_morphism(&t.map, &t.source, &t.target).map_err(|w| format!("{} is not a morphism: {w}", t.label))?;
        (0..=self.g.degree).try_for_each(|n| self.g.check_theta_natural(&t.map, &t.source, &t.target, n))
    }

    /// `•` is a bimodule map (well defined and associative) and
    /// `∇(u•v) = (id⊗•)(∇u⊗v)`, the tensor connection on `𝒯⊗𝒯` having zero braiding.
    fn product_is_morphism(&self) -> Option<Check> {
        let g = self.g;
        Some((|| {
            g.check_bullet_well_defined(g.degree)?;
            g.check_unusual_connection(g.degree)?;
            g.check_unusual_product(g.degree)
        })())
    }

    fn product_compatible(&self, e: usize) -> Option<Check> {
        Some(self.g.check_theta_product(&self.objects[e], self.g.degree))
    }

    fn unit_compatible(&self, e: usize) -> Option<Check> {
        let g = self.g;
        let m = &self.objects[e];
        let de = m.dim(g);
        Some((|| {
            for j in 0..de {
                let x = linalg::unit(de, j);
                let y = g.theta_apply(m, 0, g.algebra().unit(), &x).map_err(Self::err)?;
                if y[0] != x {
                    return Err(format!("ϑ(1⊗e{j}) != e{j}⊗1 for {}", m.name));
                }
            }
            Ok(())
        })())
    }
}

impl Geometry {
    /// `∇(u•v) = Σ ∇(u)•v` for basis `u, v` with `deg u + deg v < max`.
    pub fn check_unusual_product(&self, max: usize) -> Check {
        let sp = &self.spaces;
        let o = self.omega;
        let d = max.min(self.degree);
        let blocks = |deg: usize| -> Vec<Vector> { (0..=deg).map(|r| linalg::zeros(self.dim(&[o].into_iter().chain(self.vec_n(r)).collect::<Vec<_>>()))).collect() };
        for p in 0..d {
            for q in 0..d - p {
                let (dp, dq) = (self.dim_fields(p), self.dim_fields(q));
                for i in 0..dp {
                    let u = linalg::unit(dp, i);
                    let nu = self.unusual_nabla(p, &u);
                    for j in 0..dq {
                        let v = linalg::unit(dq, j);
                        let mut lhs = blocks(p + q + 1);
                        for k in 0..=p + q {
                            let uv = self.bullet_vec(p, &u, q, &v, k);
                            for (r, x) in self.unusual_nabla(k, &uv).into_iter().enumerate() {
                                lhs[r] = linalg::add(&lhs[r], &x);
                            }
                        }
                        let mut rhs = blocks(p + q + 1);
                        for (r, x) in nu.iter().enumerate() {
                            let list: Vec<_> = [o].into_iter().chain(self.vec_n(r)).collect();
                            let s = sp.space(&list);
                            for (c, coef) in x.iter().enumerate() {
                                if coef.is_zero() {
                                    continue;
                                }
                                let w = s.word(c);
                                let xi = linalg::unit(self.dim(&[o]), w[0]);
                                let ww = if r == 0 { self.algebra().unit().clone() } else { sp.project_word(&self.vec_n(r), &w[1..]) };
                                for k in 0..=r + q {
                                    let prod = self.bullet_vec(r, &ww, q, &v, k);
                                    linalg::axpy(&mut rhs[k], coef, &sp.tensor(&[o], &xi, &self.vec_n(k), &prod));
                                }
                            }
                        }
                        if lhs != rhs {
                            return Err(format!("∇(u•v) != ∇(u)•v at u = {p}:{i}, v = {q}:{j}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
