//! Hermitian inner products on bimodules, their tensor products, iterated inner
//! products of covariant derivatives and Sobolev Gram matrices.
//!
//! An inner product `⟨,⟩: E ⊗_A Ē → A` is stored by its values on basis pairs;
//! `⟨x, ȳ⟩ = Σ x_i·conj(y_j)·⟨e_i, ē_j⟩`.

use serde::Serialize;

use crate::algebra::{Algebra, State};
use crate::bimodule::AtomId;
use crate::connection::ConnectionModule;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::linalg::{self, ldl_certify_psd, LdlCertificate, Mat, PsdViolation, Vector};
use crate::scalar::Scalar;
use crate::tensor::Spaces;

#[derive(Clone, Debug)]
pub struct InnerProduct {
    pub module: String,
    pub list: Vec<AtomId>,
    /// `gram[i][j] = ⟨e_i, ē_j⟩ ∈ A`.
    pub gram: Vec<Vec<Vector>>,
}

fn star(alg: &Algebra, x: &[Scalar]) -> Result<Vector> {
    alg.star(x).ok_or_else(|| Error::validation("no-star", "inner products need a star structure on the algebra"))
}

impl InnerProduct {
    pub fn from_spec(g: &Geometry, m: &ConnectionModule, gram: &[Vec<Vector>]) -> Result<InnerProduct> {
        let (de, n) = (m.dim(g), g.algebra().dim());
        if gram.len() != de || gram.iter().any(|r| r.len() != de || r.iter().any(|v| v.len() != n)) {
            return Err(Error::validation("shape", format!("inner product on {} must be dim E × dim E algebra elements", m.name)));
        }
        let ip = InnerProduct { module: m.name.clone(), list: vec![m.atom], gram: gram.to_vec() };
        ip.validate(&g.spaces)?;
        for s in &g.states {
            if let Err(w) = certify(&ip.state_gram(s)) {
                return Err(Error::PositivityFailure(format!("inner product on {} through state `{}`: {w}", m.name, s.name)));
            }
        }
        Ok(ip)
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// `⟨x, ȳ⟩`.
    pub fn pair(&self, alg: &Algebra, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = linalg::zeros(alg.dim());
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                linalg::axpy(&mut out, &(xi * &yj.conj()), &self.gram[i][j]);
            }
        }
        out
    }

    /// Bimodule map `E ⊗_A Ē → A` and symmetry `⟨x, ȳ⟩ = ⟨y, x̄⟩*`, on bases.
    pub fn validate(&self, sp: &Spaces) -> Result<()> {
        let alg = sp.algebra();
        let d = self.dim();
        let fail = |w: String| Err(Error::validation("inner-product", format!("{}: {w}", self.module)));
        for i in 0..d {
            for j in 0..d {
                if self.gram[i][j] != star(alg, &self.gram[j][i])? {
                    return fail(format!("⟨e{i}, ē{j}⟩ != ⟨e{j}, ē{i}⟩*"));
                }
            }
        }
        for a in 0..alg.dim() {
            let ab = alg.basis(a);
            let abs = star(alg, &ab)?;
            let name = &alg.names[a];
            for i in 0..d {
                let ei = linalg::unit(d, i);
                for j in 0..d {
                    let ej = linalg::unit(d, j);
                    let g = &self.gram[i][j];
                    if self.pair(alg, &sp.left_act(&self.list, &ab, &ei), &ej) != alg.mul(&ab, g) {
                        return fail(format!("⟨{name}·e{i}, ē{j}⟩ != {name}·⟨e{i}, ē{j}⟩"));
                    }
                    if self.pair(alg, &ei, &sp.left_act(&self.list, &abs, &ej)) != alg.mul(g, &ab) {
                        return fail(format!("⟨e{i}, ē{j}·{name}⟩ != ⟨e{i}, ē{j}⟩·{name}"));
                    }
                    let lhs = self.pair(alg, &sp.right_act(&self.list, &ei, &ab), &ej);
                    let rhs = self.pair(alg, &ei, &sp.right_act(&self.list, &ej, &abs));
                    if lhs != rhs {
                        return fail(format!("⟨e{i}·{name}, ē{j}⟩ != ⟨e{i}, {name}·ē{j}⟩"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `G[i][j] = φ(⟨e_i, ē_j⟩)`.
    pub fn state_gram(&self, s: &State) -> Mat {
        let d = self.dim();
        let mut g = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                g.set(i, j, s.eval(&self.gram[i][j]));
            }
        }
        g
    }

    /// `⟨x⊗y, \overline{x'⊗y'}⟩ = ⟨x·⟨y, ȳ'⟩_F, x̄'⟩_E` on `E ⊗_A F`.
    pub fn tensor(sp: &Spaces, e: &InnerProduct, f: &InnerProduct) -> Result<InnerProduct> {
        let alg = sp.algebra();
        let list: Vec<AtomId> = e.list.iter().chain(&f.list).copied().collect();
        let s = sp.space(&list);
        let k = e.list.len();
        let parts: Vec<(Vector, Vector)> = (0..s.dim())
            .map(|q| {
                let w = s.word(q);
                (sp.project_word(&e.list, &w[..k]), sp.project_word(&f.list, &w[k..]))
            })
            .collect();
        let gram = parts
            .iter()
            .map(|(x, y)| {
                parts
                    .iter()
                    .map(|(x2, y2)| {
                        let inner = f.pair(alg, y, y2);
                        e.pair(alg, &sp.right_act(&e.list, x, &inner), x2)
                    })
                    .collect()
            })
            .collect();
        let ip = InnerProduct { module: format!("{}⊗{}", e.module, f.module), list, gram };
        ip.validate(sp)?;
        Ok(ip)
    }
}

/// PSD certificate of a Gram matrix `G[i][j] = φ(⟨e_i, ē_j⟩)`, or the witness `x` with
/// `Σ x_i·G[i][j]·conj(x_j) < 0`.
pub fn certify(g: &Mat) -> std::result::Result<LdlCertificate, String> {
    // Σ x_i G_ij conj(x_j) is the Hermitian form yᴴ G y at y = conj(x).
    match ldl_certify_psd(g) {
        Ok(c) => Ok(c),
        Err(PsdViolation::Negative { vector, value }) => {
            Err(format!("norm {} < 0 at x = {}", value, linalg::fmt_vector(&linalg::conj(&vector))))
        }
        Err(PsdViolation::NotHermitian { row, col }) => Err(format!("Gram matrix is not hermitian at ({row}, {col})")),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SobolevGram {
    pub module: String,
    pub state: String,
    pub order: usize,
    pub gram: Mat,
    /// Pivots of the LDL certificate.
    pub pivots: Vec<String>,
    pub strictly_positive: bool,
}

impl Geometry {
    /// The inner product declared on `Ω¹`; the empty one when `Ω¹ = 0`.
    pub fn omega_inner_product(&self) -> Result<InnerProduct> {
        if let Some(p) = self.inner_products.iter().find(|p| p.list == [self.omega]) {
            return Ok(p.clone());
        }
        if self.dim(&[self.omega]) == 0 {
            return Ok(InnerProduct { module: "Ω¹".into(), list: vec![self.omega], gram: Vec::new() });
        }
        Err(Error::UnknownName("inner product on Ω¹".into()))
    }

    /// `⟨,⟩_n` on `Ω^{⊗n} ⊗_A E`.
    pub fn tower_inner_product(&self, ip: &InnerProduct, n: usize) -> Result<InnerProduct> {
        let mut acc = ip.clone();
        if n == 0 {
            return Ok(acc);
        }
        let om = self.omega_inner_product()?;
        for _ in 0..n {
            acc = InnerProduct::tensor(&self.spaces, &om, &acc)?;
        }
        Ok(acc)
    }

    /// `⟨⟨e_i, ē_k⟩⟩_n = ⟨∇⁽ⁿ⁾e_i, \overline{∇⁽ⁿ⁾e_k}⟩_n`.
    pub fn iterated_inner(&self, m: &ConnectionModule, ip: &InnerProduct, n: usize) -> Result<Vec<Vec<Vector>>> {
        let tower = self.tower_inner_product(ip, n)?;
        let nab = self.iterate_nabla(m, n);
        let de = m.dim(self);
        let cols: Vec<Vector> = (0..de).map(|i| nab.col(i)).collect();
        Ok(cols.iter().map(|x| cols.iter().map(|y| tower.pair(self.algebra(), x, y)).collect()).collect())
    }

    /// `G[i][k] = Σ_{j≤n} φ(⟨⟨e_i, ē_k⟩⟩_j)` with its positivity certificate.
    pub fn sobolev_gram(&self, module: &str, state: &str, n: usize) -> Result<SobolevGram> {
        let m = self.module(module)?;
        let ip = self.inner_product(module)?;
        let s = self.state(state)?;
        let gram = self.sobolev_gram_matrix(&m, ip, s, n)?;
        let cert = certify(&gram).map_err(|w| Error::PositivityFailure(format!("W^{{{n},2}} Gram of {module} under `{state}`: {w}")))?;
        Ok(SobolevGram {
            module: module.to_string(),
            state: state.to_string(),
            order: n,
            strictly_positive: cert.is_strictly_positive(),
            pivots: cert.d.iter().map(|x| x.to_string()).collect(),
            gram,
        })
    }

    pub fn sobolev_gram_matrix(&self, m: &ConnectionModule, ip: &InnerProduct, s: &State, n: usize) -> Result<Mat> {
        let de = m.dim(self);
        let mut gram = Mat::zeros(de, de);
        for j in 0..=n {
            gram = gram.add(&self.sobolev_term(m, ip, s, j)?);
        }
        Ok(gram)
    }

    /// `φ(⟨⟨e_i, ē_k⟩⟩_j)` for one `j`.
    pub fn sobolev_term(&self, m: &ConnectionModule, ip: &InnerProduct, s: &State, j: usize) -> Result<Mat> {
        let de = m.dim(self);
        let inner = self.iterated_inner(m, ip, j)?;
        let mut t = Mat::zeros(de, de);
        for i in 0..de {
            for k in 0..de {
                t.set(i, k, s.eval(&inner[i][k]));
            }
        }
        Ok(t)
    }
}
