//! Left and bimodule connections, and connections on tensor products.

use std::sync::{Arc, OnceLock};

use crate::bimodule::AtomId;
use crate::crossing::ThetaDegree;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, Memo};
use crate::linalg::{self, inverse, Mat};

/// A module `E` with a left connection `∇: E → Ω¹ ⊗_A E` and, for bimodule
/// connections, the structure map `σ_E: E ⊗_A Ω¹ → Ω¹ ⊗_A E`.
pub struct ConnectionModule {
    pub name: String,
    pub atom: AtomId,
    pub nabla: Mat,
    pub sigma: Option<Mat>,
    pub sigma_inv: Option<Mat>,
    pub(crate) memo_nabla: Memo<usize, Mat>,
    pub(crate) memo_act: Memo<usize, Mat>,
    pub(crate) memo_theta: Memo<usize, ThetaDegree>,
    pub(crate) memo_theta_inv: Memo<usize, ThetaDegree>,
    /// The braid `Vec ⊗ E → E ⊗ Vec` and its inverse.
    pub(crate) vec_braid: OnceLock<Option<(Mat, Mat)>>,
}

impl std::fmt::Debug for ConnectionModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConnectionModule").field("name", &self.name).field("atom", &self.atom).finish()
    }
}

impl ConnectionModule {
    pub fn new(g: &Geometry, name: &str, atom: AtomId, nabla: Mat, sigma: Option<Mat>) -> Result<ConnectionModule> {
        let (de, dom) = (g.dim(&[atom]), g.dim(&[g.omega, atom]));
        if nabla.rows() != dom || nabla.cols() != de {
            return Err(Error::validation("shape", format!("∇ of {name} has the wrong shape")));
        }
        if let Some(s) = &sigma {
            if s.rows() != dom || s.cols() != g.dim(&[atom, g.omega]) {
                return Err(Error::validation("shape", format!("σ of {name} has the wrong shape")));
            }
        }
        let sigma_inv = sigma.as_ref().and_then(inverse);
        Ok(ConnectionModule {
            name: name.to_string(),
            atom,
            nabla,
            sigma,
            sigma_inv,
            memo_nabla: Memo::new(),
            memo_act: Memo::new(),
            memo_theta: Memo::new(),
        memo_theta_inv: Memo::new(),
            vec_braid: OnceLock::new(),
        })
    }

    pub fn dim(&self, g: &Geometry) -> usize {
        g.dim(&[self.atom])
    }

    /// Left Leibniz rule; with `σ_E`, also that `σ_E` is a bimodule map and the right Leibniz rule.
    pub fn validate(&self, g: &Geometry) -> Result<()> {
        let sp = &g.spaces;
        let alg = g.algebra();
        let (e, o) = (self.atom, g.omega);
        let de = self.dim(g);
        let fail = |what: String| Err(Error::validation("module-leibniz", format!("{}: {}", self.name, what)));
        if let Some(s) = &self.sigma {
            if let Err(w) = sp.is_bimodule_map(s, &[e, o], &[o, e]) {
                return Err(Error::validation("sigma-bimodule", format!("{}: {}", self.name, w)));
            }
        }
        for j in 0..de {
            let x = linalg::unit(de, j);
            let nx = self.nabla.col(j);
            for k in 0..alg.dim() {
                let a = alg.basis(k);
                let da = g.d_of(&a);
                let lhs = self.nabla.mul_vec(&sp.left_act(&[e], &a, &x));
                let rhs = linalg::add(&sp.tensor(&[o], &da, &[e], &x), &sp.left_act(&[o, e], &a, &nx));
                if lhs != rhs {
                    return fail(format!("∇({0}·e{j}) != d{0}⊗e{j} + {0}·∇e{j}", alg.names[k]));
                }
                if let Some(s) = &self.sigma {
                    let lhs = self.nabla.mul_vec(&sp.right_act(&[e], &x, &a));
                    let rhs = linalg::add(&sp.right_act(&[o, e], &nx, &a), &s.mul_vec(&sp.tensor(&[e], &x, &[o], &da)));
                    if lhs != rhs {
                        return fail(format!("∇(e{j}·{0}) != ∇e{j}·{0} + σ(e{j}⊗d{0})", alg.names[k]));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn require_sigma(&self) -> Result<&Mat> {
        self.sigma.as_ref().ok_or_else(|| Error::SigmaRequired(self.name.clone()))
    }
}

impl Geometry {
    /// The algebra with `∇ = d` and `σ(a⊗ξ) = a·ξ⊗1`.
    pub fn algebra_module(&self) -> ConnectionModule {
        let sp = &self.spaces;
        let (a, o) = (self.a, self.omega);
        let n = self.algebra().dim();
        let one = self.algebra().unit().clone();
        let nabla = Mat::from_fn_cols(self.dim(&[o, a]), n, |i| sp.tensor(&[o], &self.d.col(i), &[a], &one));
        let src = sp.space(&[a, o]);
        let sigma = Mat::from_fn_cols(self.dim(&[o, a]), src.dim(), |q| {
            let w = src.word(q);
            let xi = sp.left_act(&[o], &self.algebra().basis(w[0]), &linalg::unit(self.dim(&[o]), w[1]));
            sp.tensor(&[o], &xi, &[a], &one)
        });
        ConnectionModule::new(self, "A", a, nabla, Some(sigma)).expect("shapes agree")
    }

    /// `Ω¹` with `∇ = σ∘□` and `σ_Ω = σ`.
    pub fn omega_module(&self) -> ConnectionModule {
        ConnectionModule::new(self, "Ω¹", self.omega, self.sigma.mul(&self.box_), Some(self.sigma.clone())).expect("shapes agree")
    }

    /// Vector fields with the dual connection.
    pub fn vec_module(&self) -> Result<ConnectionModule> {
        ConnectionModule::new(self, "Vec", self.vec, self.box_vec.clone(), Some(self.sigma_vec.clone()))
    }

    /// The connection module on a single atom: a declared module if one uses the
    /// atom, else the standard structure on `A`, `Ω¹` or `Vec`.
    fn atom_module(&self, atom: AtomId) -> Result<ConnectionModule> {
        if let Some(m) = self.modules.iter().find(|m| m.atom == atom) {
            return ConnectionModule::new(self, &m.name, atom, m.nabla.clone(), m.sigma.clone());
        }
        if atom == self.a {
            Ok(self.algebra_module())
        } else if atom == self.omega {
            Ok(self.omega_module())
        } else if atom == self.vec {
            self.vec_module()
        } else {
            match self.spaces.atom(atom).parts.clone() {
                Some(parts) => {
                    let m: Arc<ConnectionModule> = self.connection_on(&parts)?;
                    Ok(clone_module(&m))
                }
                None => Err(Error::UnknownName(format!("no connection on {}", self.spaces.name(atom)))),
            }
        }
    }

    /// The (shared, cached) connection module on `T(list)`; a list of several
    /// factors is frozen into one atom carrying the tensor-product connection.
    pub fn connection_on(&self, list: &[AtomId]) -> Result<Arc<ConnectionModule>> {
        self.memo_modules.try_get_or(&list.to_vec(), || match list {
            [] => Ok(self.algebra_module()),
            [m] => self.atom_module(*m),
            _ => {
                let mods = list.iter().map(|&m| self.connection_on(&[m])).collect::<Result<Vec<_>>>()?;
                let refs: Vec<&ConnectionModule> = mods.iter().map(|m| m.as_ref()).collect();
                self.product_connection(&refs)
            }
        })
    }

    /// `∇_{E⊗F} = ∇_E⊗id + (σ_E⊗id)(id⊗∇_F)`, `σ_{E⊗F} = (σ_E⊗id)(id⊗σ_F)`.
    pub fn tensor_connection(&self, e: &ConnectionModule, f: &ConnectionModule) -> Result<ConnectionModule> {
        self.product_connection(&[e, f])
    }

    fn product_connection(&self, mods: &[&ConnectionModule]) -> Result<ConnectionModule> {
        let sp = &self.spaces;
        let list: Vec<AtomId> = mods.iter().map(|m| m.atom).collect();
        let nabla = self.nabla_list(mods)?;
        let sigma = self.sigma_list(mods);
        let frozen = sp.freeze(&list);
        let o = self.omega;
        let ol: Vec<AtomId> = [o].iter().chain(&list).copied().collect();
        let to_frozen = sp.regroup(&ol, &[o, frozen]);
        let nabla = to_frozen.mul(&nabla).mul(&sp.regroup(&[frozen], &list));
        let sigma = sigma.map(|s| {
            let lo: Vec<AtomId> = list.iter().chain(&[o]).copied().collect();
            to_frozen.mul(&s).mul(&sp.regroup(&[frozen, o], &lo))
        });
        let name = mods.iter().map(|m| m.name.as_str()).collect::<Vec<_>>().join("⊗");
        ConnectionModule::new(self, &name, frozen, nabla, sigma)
    }

    /// `∇` on `T(list)`, landing in `T([Ω¹] ++ list)`.
    fn nabla_list(&self, mods: &[&ConnectionModule]) -> Result<Mat> {
        let sp = &self.spaces;
        let o = self.omega;
        let list: Vec<AtomId> = mods.iter().map(|m| m.atom).collect();
        if mods.len() == 1 {
            return Ok(mods[0].nabla.clone());
        }
        let head = mods[0];
        let rest = &list[1..];
        let sigma = head.require_sigma()?;
        let rest_nabla = self.nabla_list(&mods[1..])?;
        let s = sp.space(&list);
        let o_rest: Vec<AtomId> = [o].iter().chain(rest).copied().collect();
        let eor: Vec<AtomId> = [head.atom, o].iter().chain(rest).copied().collect();
        let out: Vec<AtomId> = [o].iter().chain(&list).copied().collect();
        let de = head.dim(self);
        Ok(Mat::from_fn_cols(self.dim(&out), s.dim(), |q| {
            let w = s.word(q);
            let e = linalg::unit(de, w[0]);
            let r = sp.project_word(rest, &w[1..]);
            let t1 = sp.tensor(&[o, head.atom], &head.nabla.col(w[0]), rest, &r);
            let x = sp.tensor(&[head.atom], &e, &o_rest, &rest_nabla.mul_vec(&r));
            let t2 = sp.apply_at(&eor, 0, 2, sigma, &[o, head.atom], &x);
            linalg::add(&t1, &t2)
        }))
    }

    /// `σ` on `T(list)`, as a map `T(list ++ [Ω¹]) → T([Ω¹] ++ list)`; `None` if a factor lacks one.
    fn sigma_list(&self, mods: &[&ConnectionModule]) -> Option<Mat> {
        let sp = &self.spaces;
        let o = self.omega;
        let list: Vec<AtomId> = mods.iter().map(|m| m.atom).collect();
        let mut src: Vec<AtomId> = list.iter().chain(&[o]).copied().collect();
        let mut acc = Mat::identity(self.dim(&src));
        for k in (0..mods.len()).rev() {
            let s = mods[k].sigma.as_ref()?;
            let step = sp.whisker(&src, k, k + 2, s, &[o, mods[k].atom]);
            acc = step.mul(&acc);
            src.swap(k, k + 1);
        }
        Some(acc)
    }

    /// The tensor-product connection formula descends to `E ⊗_A F`.
    pub fn check_tensor_connection_balanced(&self, e: &ConnectionModule, f: &ConnectionModule) -> std::result::Result<(), String> {
        let sp = &self.spaces;
        let o = self.omega;
        let sigma = e.sigma.as_ref().ok_or_else(|| format!("{} has no σ", e.name))?;
        sp.check_balanced(&[e.atom], &[f.atom], |x, y| {
            let t1 = sp.tensor(&[o, e.atom], &e.nabla.mul_vec(x), &[f.atom], y);
            let z = sp.tensor(&[e.atom], x, &[o, f.atom], &f.nabla.mul_vec(y));
            let t2 = sp.apply_at(&[e.atom, o, f.atom], 0, 2, sigma, &[o, e.atom], &z);
            linalg::add(&t1, &t2)
        })
        .map_err(|(x, a, y)| format!("{}⊗{} at (e{x}·{}, f{y})", e.name, f.name, self.algebra().names[a]))
    }

    /// For a morphism `T: E → F` of left connections, `(id⊗T)∇_E = ∇_F∘T` and, when both
    /// carry `σ`, `σ_F(T⊗id) = (id⊗T)σ_E`.
    pub fn check_morphism(&self, t: &Mat, e: &ConnectionModule, f: &ConnectionModule) -> std::result::Result<(), String> {
        let sp = &self.spaces;
        let o = self.omega;
        let lhs = sp.whisker(&[o, e.atom], 1, 2, t, &[f.atom]).mul(&e.nabla);
        let rhs = f.nabla.mul(t);
        if let Some((r, c)) = lhs.first_difference(&rhs) {
            return Err(format!("(id⊗T)∇ != ∇T at entry ({r}, {c})"));
        }
        if let (Some(se), Some(sf)) = (&e.sigma, &f.sigma) {
            let lhs = sf.mul(&sp.whisker(&[e.atom, o], 0, 1, t, &[f.atom]));
            let rhs = sp.whisker(&[o, e.atom], 1, 2, t, &[f.atom]).mul(se);
            if let Some((r, c)) = lhs.first_difference(&rhs) {
                return Err(format!("σ_F(T⊗id) != (id⊗T)σ_E at entry ({r}, {c})"));
            }
        }
        Ok(())
    }
}

fn clone_module(m: &ConnectionModule) -> ConnectionModule {
    ConnectionModule {
        name: m.name.clone(),
        atom: m.atom,
        nabla: m.nabla.clone(),
        sigma: m.sigma.clone(),
        sigma_inv: m.sigma_inv.clone(),
        memo_nabla: Memo::new(),
        memo_act: Memo::new(),
        memo_theta: Memo::new(),
        memo_theta_inv: Memo::new(),
        vec_braid: OnceLock::new(),
    }
}
