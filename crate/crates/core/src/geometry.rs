//! A loaded bundle: the algebra, its calculus, vector fields and connections, with
//! write-once caches for everything derived from them.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use crate::algebra::{Algebra, State};
use crate::bimodule::{AtomId, Bimodule};
use crate::bundle::{Bundle, ModuleSpec};
use crate::connection::ConnectionModule;
use crate::error::{Error, Result};
use crate::fgp::{dualize_right_module, Dual};
use crate::linalg::{self, inverse, kernel, rank, Mat, Vector};
use crate::scalar::{Field, Scalar};
use crate::sobolev::InnerProduct;
use crate::tensor::Spaces;

/// A write-once cache. Values are computed outside the lock, so a computation may
/// consult the cache recursively.
pub struct Memo<K, V> {
    map: Mutex<HashMap<K, Arc<V>>>,
}

impl<K: Eq + Hash + Clone, V> Memo<K, V> {
    pub fn new() -> Memo<K, V> {
        Memo { map: Mutex::new(HashMap::new()) }
    }

    pub fn get_or(&self, key: &K, f: impl FnOnce() -> V) -> Arc<V> {
        if let Some(v) = self.map.lock().unwrap().get(key) {
            return v.clone();
        }
        let v = Arc::new(f());
        self.map.lock().unwrap().entry(key.clone()).or_insert(v).clone()
    }

    pub fn try_get_or(&self, key: &K, f: impl FnOnce() -> Result<V>) -> Result<Arc<V>> {
        if let Some(v) = self.map.lock().unwrap().get(key) {
            return Ok(v.clone());
        }
        let v = Arc::new(f()?);
        Ok(self.map.lock().unwrap().entry(key.clone()).or_insert(v).clone())
    }
}

impl<K: Eq + Hash + Clone, V> Default for Memo<K, V> {
    fn default() -> Self {
        Memo::new()
    }
}

pub struct Geometry {
    pub name: String,
    pub field: Field,
    pub degree: usize,
    pub spaces: Spaces,
    /// The algebra as a bimodule over itself.
    pub a: AtomId,
    pub omega: AtomId,
    pub vec: AtomId,
    /// `d: A → Ω¹`.
    pub d: Mat,
    pub dual: Dual,
    /// `□: Ω¹ → Ω¹ ⊗ Ω¹`.
    pub box_: Mat,
    pub sigma_inv: Mat,
    pub sigma: Mat,
    /// The dual left connection on vector fields and its braiding `Vec ⊗ Ω¹ → Ω¹ ⊗ Vec`.
    pub box_vec: Mat,
    pub sigma_vec: Mat,
    pub modules: Vec<Arc<ConnectionModule>>,
    pub inner_products: Vec<InnerProduct>,
    pub states: Vec<State>,
    pub(crate) memo_ev: Memo<usize, Mat>,
    pub(crate) memo_coev: Memo<usize, Vector>,
    pub(crate) memo_box_forms: Memo<usize, Mat>,
    pub(crate) memo_box_fields: Memo<usize, Mat>,
    pub(crate) memo_bullet: Memo<(usize, usize, usize), Mat>,
    pub(crate) memo_modules: Memo<Vec<AtomId>, ConnectionModule>,
}

fn shaped(m: &Mat, rows: usize, cols: usize, what: &str) -> Result<Mat> {
    if m.rows() == rows && m.cols() == cols {
        return Ok(m.clone());
    }
    if rows == 0 && m.rows() == 0 {
        return Ok(Mat::zeros(0, cols));
    }
    Err(Error::validation("shape", format!("{what} is {}x{}, expected {rows}x{cols}", m.rows(), m.cols())))
}

impl Geometry {
    /// Validates a bundle and prepares it for computation; `degree` overrides the
    /// bundle's truncation degree.
    pub fn from_bundle(b: &Bundle, degree: Option<usize>) -> Result<Geometry> {
        let n = b.algebra.basis.len();
        let bad_shape = |what: &str| Err(Error::validation("shape", what.to_string()));
        if b.algebra.unit.len() != n || b.algebra.mul.len() != n || b.algebra.mul.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n)) {
            return bad_shape("algebra structure constants must be dim A × dim A vectors of length dim A");
        }
        let star = match &b.algebra.star {
            Some(s) => Some(shaped(s, n, n, "star")?),
            None => None,
        };
        let alg = Algebra::new(b.field, b.algebra.basis.clone(), b.algebra.mul.clone(), b.algebra.unit.clone(), star);
        alg.validate()?;
        let spaces = Spaces::new(Arc::new(alg));
        let alg = spaces.algebra();
        let a = spaces.add_atom(Bimodule::regular(alg));

        let de = b.omega1.basis.len();
        if b.omega1.left.len() != n || b.omega1.right.len() != n {
            return bad_shape("omega1 needs one action matrix per algebra basis element");
        }
        let left = b.omega1.left.iter().map(|m| shaped(m, de, de, "omega1 action")).collect::<Result<Vec<_>>>()?;
        let right = b.omega1.right.iter().map(|m| shaped(m, de, de, "omega1 action")).collect::<Result<Vec<_>>>()?;
        let mut om = Bimodule::new("Ω¹", left, right);
        om.dim = de;
        om.validate(alg)?;
        let omega = spaces.add_atom(om);

        let d = shaped(&b.d, de, n, "d")?;
        check_calculus(&spaces, omega, &d)?;

        let dual = dualize_right_module(&spaces, omega, &b.dual_basis.forms, &b.dual_basis.fields, &b.dual_basis.names)?;
        let vec = dual.atom;

        let oo = [omega, omega];
        let box_plain = shaped(&b.right_connection.box_, de * de, de, "box")?;
        let box_ = spaces.descend(&box_plain, &[omega], &oo).map_err(|w| Error::validation("box-descent", w))?;
        let si_plain = shaped(&b.right_connection.sigma_inv, de * de, de * de, "sigma_inv")?;
        let sigma_inv = spaces.descend(&si_plain, &oo, &oo).map_err(|w| Error::validation("sigma-descent", w))?;
        spaces.is_bimodule_map(&sigma_inv, &oo, &oo).map_err(|w| Error::validation("sigma-bimodule", w))?;
        let sigma = match inverse(&sigma_inv) {
            Some(s) => s,
            None => {
                let k = kernel(&sigma_inv);
                return Err(Error::validation("sigma-invertible", format!("σ⁻¹ kills {}", linalg::fmt_vector(&k[0]))));
            }
        };

        let mut g = Geometry {
            name: b.name.clone(),
            field: b.field,
            degree: degree.unwrap_or(b.degree),
            spaces,
            a,
            omega,
            vec,
            d,
            dual,
            box_,
            sigma_inv,
            sigma,
            box_vec: Mat::zeros(0, 0),
            sigma_vec: Mat::zeros(0, 0),
            modules: Vec::new(),
            inner_products: Vec::new(),
            states: Vec::new(),
            memo_ev: Memo::new(),
            memo_coev: Memo::new(),
            memo_box_forms: Memo::new(),
            memo_box_fields: Memo::new(),
            memo_bullet: Memo::new(),
            memo_modules: Memo::new(),
        };
        g.check_box_leibniz()?;
        g.box_vec = g.build_box_vec();
        g.sigma_vec = g.build_sigma_vec();
        g.check_duality().map_err(Error::DualityFailure)?;

        for spec in &b.modules {
            if g.modules.iter().any(|m| m.name == spec.name()) {
                return Err(Error::validation("modules", format!("duplicate module name `{}`", spec.name())));
            }
            let m = g.module_from_spec(spec)?;
            g.modules.push(Arc::new(m));
        }
        for s in &b.states {
            let st = State { name: s.name.clone(), functional: s.functional.clone() };
            st.validate(g.algebra())?;
            g.states.push(st);
        }
        for ip in &b.inner_products {
            let m = g.module(&ip.module)?;
            let ip = InnerProduct::from_spec(&g, &m, &ip.gram)?;
            g.inner_products.push(ip);
        }
        Ok(g)
    }

    pub fn algebra(&self) -> &Algebra {
        self.spaces.algebra()
    }

    pub fn omega_n(&self, n: usize) -> Vec<AtomId> {
        vec![self.omega; n]
    }

    pub fn vec_n(&self, n: usize) -> Vec<AtomId> {
        vec![self.vec; n]
    }

    pub fn dim(&self, list: &[AtomId]) -> usize {
        self.spaces.dim(list)
    }

    /// `d` of an algebra element.
    pub fn d_of(&self, a: &[Scalar]) -> Vector {
        self.d.mul_vec(a)
    }

    pub fn module(&self, name: &str) -> Result<Arc<ConnectionModule>> {
        self.modules.iter().find(|m| m.name == name).cloned().ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn state(&self, name: &str) -> Result<&State> {
        self.states.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn inner_product(&self, module: &str) -> Result<&InnerProduct> {
        self.inner_products.iter().find(|p| p.module == module).ok_or_else(|| Error::UnknownName(format!("inner product on {module}")))
    }

    fn module_from_spec(&self, spec: &ModuleSpec) -> Result<ConnectionModule> {
        let mut m = match spec {
            ModuleSpec::Algebra { .. } => self.algebra_module(),
            ModuleSpec::Omega1 { .. } => self.omega_module(),
            ModuleSpec::Vec { .. } => self.vec_module()?,
            ModuleSpec::Custom { name, basis, left, right, nabla, sigma } => {
                let alg = self.algebra();
                let de = basis.len();
                if left.len() != alg.dim() || right.len() != alg.dim() {
                    return Err(Error::validation("shape", format!("module {name} needs one action matrix per algebra basis element")));
                }
                let left = left.iter().map(|m| shaped(m, de, de, "module action")).collect::<Result<Vec<_>>>()?;
                let right = right.iter().map(|m| shaped(m, de, de, "module action")).collect::<Result<Vec<_>>>()?;
                let mut bm = Bimodule::new(name, left, right);
                bm.dim = de;
                bm.validate(alg)?;
                let e = self.spaces.add_atom(bm);
                let dom = self.dim(&[self.omega]);
                let nabla = shaped(nabla, dom * de, de, "nabla")?;
                let nabla = self.spaces.descend(&nabla, &[e], &[self.omega, e]).map_err(|w| Error::validation("nabla-descent", w))?;
                let sigma = match sigma {
                    Some(s) => {
                        let s = shaped(s, dom * de, dom * de, "sigma")?;
                        Some(self.spaces.descend(&s, &[e, self.omega], &[self.omega, e]).map_err(|w| Error::validation("sigma-descent", w))?)
                    }
                    None => None,
                };
                ConnectionModule::new(self, name, e, nabla, sigma)?
            }
        };
        m.name = spec.name().to_string();
        m.validate(self)?;
        Ok(m)
    }
}

/// Leibniz rule and `Ω¹ = span A·dA`.
fn check_calculus(sp: &Spaces, omega: AtomId, d: &Mat) -> Result<()> {
    let alg = sp.algebra();
    let om = sp.atom(omega);
    let n = alg.dim();
    for i in 0..n {
        for j in 0..n {
            let lhs = d.mul_vec(&alg.structure()[i][j]);
            let rhs = linalg::add(&om.right_act(&d.col(i), &alg.basis(j)), &om.left_act(&alg.basis(i), &d.col(j)));
            if lhs != rhs {
                return Err(Error::validation(
                    "leibniz",
                    format!("d({0}·{1}) != d{0}·{1} + {0}·d{1}", alg.names[i], alg.names[j]),
                ));
            }
        }
    }
    let spans: Vec<Vector> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| om.left_act(&alg.basis(i), &d.col(j))).collect();
    if om.dim > 0 && rank(&Mat::from_rows(spans, om.dim)) < om.dim {
        return Err(Error::validation("calculus-span", "Ω¹ is not spanned by a·db"));
    }
    Ok(())
}
