//! Duals of finitely generated projective right modules.

use crate::bimodule::{AtomId, Bimodule};
use crate::error::{Error, Result};
use crate::linalg::{self, free_columns, inverse, kernel, Mat, Vector};
use crate::tensor::Spaces;

/// The right dual `E* = Hom_A(E, A)` of a bimodule, with evaluation and coevaluation.
#[derive(Clone, Debug)]
pub struct Dual {
    pub of: AtomId,
    pub atom: AtomId,
    pub names: Vec<String>,
    /// `funcs[i]` is the `N × dim E` matrix of the `i`-th basis functional.
    pub funcs: Vec<Mat>,
    /// `ev: E* ⊗_A E → A`.
    pub ev: Mat,
    /// `coev(1) ∈ E ⊗_A E*`.
    pub coev: Vector,
    /// The dual basis: forms in `E`, functionals in coordinates of `E*`.
    pub forms: Vec<Vector>,
    pub fields: Vec<Vector>,
    pub field_funcs: Vec<Mat>,
}

/// Linear constraints cutting out the right `A`-linear maps `E → A`, on the
/// flattened matrix of a map (index `k·dim E + j` for the `a_k`-coefficient of `α(e_j)`).
fn right_linearity_constraints(sp: &Spaces, e: &Bimodule) -> Mat {
    let alg = sp.algebra();
    let (n, de) = (alg.dim(), e.dim);
    let mut rows = Vec::new();
    for l in 0..n {
        let ra = alg.right_basis(l);
        for j in 0..de {
            for k in 0..n {
                let mut row = linalg::zeros(n * de);
                for j2 in 0..de {
                    row[k * de + j2] += e.right[l].get(j2, j);
                }
                for k2 in 0..n {
                    row[k2 * de + j] -= ra.get(k, k2);
                }
                rows.push(row);
            }
        }
    }
    Mat::from_rows(rows, n * de)
}

fn flatten(m: &Mat) -> Vector {
    m.to_rows().concat()
}

fn unflatten(v: &[crate::scalar::Scalar], n: usize, de: usize) -> Mat {
    Mat::from_rows(v.chunks(de.max(1)).take(n).map(<[_]>::to_vec).collect(), de)
}

/// Builds `E*` from a candidate dual basis `Σ forms[i]·fields[i](e) = e`.
///
/// The functionals become the basis of `E*` when they are one; otherwise a kernel
/// basis of the right-linearity constraints is used.
pub fn dualize_right_module(sp: &Spaces, of: AtomId, forms: &[Vector], fields: &[Mat], field_names: &[String]) -> Result<Dual> {
    let alg = sp.algebra();
    let e = sp.atom(of);
    let (n, de) = (alg.dim(), e.dim);
    if forms.len() != fields.len() {
        return Err(Error::validation("dual-basis", "forms and fields differ in number"));
    }
    for (i, (f, m)) in forms.iter().zip(fields).enumerate() {
        if f.len() != de || (de > 0 && (m.rows() != n || m.cols() != de)) {
            return Err(Error::validation("dual-basis", format!("dual basis entry {i} has the wrong shape")));
        }
    }
    let fields: Vec<Mat> = fields.iter().map(|m| if de == 0 { Mat::zeros(n, 0) } else { m.clone() }).collect();
    let constraints = right_linearity_constraints(sp, &e);
    for (i, f) in fields.iter().enumerate() {
        let c = constraints.mul_vec(&flatten(f));
        if let Some(r) = c.iter().position(|x| !x.is_zero()) {
            let (l, j) = (r / (de * n), (r / n) % de);
            return Err(Error::validation(
                "ev-bimodule",
                format!(
                    "functional {} is not right A-linear: f(e{j}·{}) != f(e{j})·{}",
                    field_names.get(i).cloned().unwrap_or(i.to_string()),
                    alg.names[l],
                    alg.names[l]
                ),
            ));
        }
    }
    let kern = kernel(&constraints);
    let free = free_columns(&constraints);
    let dim = kern.len();
    let kcoords = |flat: &Vector| -> Vector { free.iter().map(|&c| flat[c].clone()).collect() };
    let field_k: Vec<Vector> = fields.iter().map(|f| kcoords(&flatten(f))).collect();
    let (basis_flat, names, to_basis): (Vec<Vector>, Vec<String>, Mat) = {
        let fm = Mat::from_cols(dim, &field_k);
        match (fields.len() == dim).then(|| inverse(&fm)).flatten() {
            Some(inv) => (fields.iter().map(flatten).collect(), field_names.to_vec(), inv),
            None => (kern.clone(), (0..dim).map(|i| format!("v{i}")).collect(), Mat::identity(dim)),
        }
    };
    let coords = |flat: &Vector| -> Vector { to_basis.mul_vec(&kcoords(flat)) };
    let funcs: Vec<Mat> = basis_flat.iter().map(|f| unflatten(f, n, de)).collect();
    let left: Vec<Mat> = (0..n)
        .map(|a| Mat::from_fn_cols(dim, dim, |i| coords(&flatten(&alg.left_basis(a).mul(&funcs[i])))))
        .collect();
    let right: Vec<Mat> = (0..n)
        .map(|a| Mat::from_fn_cols(dim, dim, |i| coords(&flatten(&funcs[i].mul(&e.left[a])))))
        .collect();
    let atom = sp.add_atom(Bimodule::new(&format!("{}*", e.name), left, right));
    let ev_src = [atom, of];
    let ev = Mat::from_fn_cols(n, sp.dim(&ev_src), |q| {
        let w = sp.space(&ev_src).word(q).to_vec();
        funcs[w[0]].col(w[1])
    });
    let field_coords: Vec<Vector> = fields.iter().map(|f| coords(&flatten(f))).collect();
    let mut coev = linalg::zeros(sp.dim(&[of, atom]));
    for (f, v) in forms.iter().zip(&field_coords) {
        let t = sp.tensor(&[of], f, &[atom], v);
        linalg::axpy(&mut coev, &crate::scalar::Scalar::ONE, &t);
    }
    for j in 0..de {
        let mut acc = linalg::zeros(de);
        for (f, m) in forms.iter().zip(&fields) {
            linalg::axpy(&mut acc, &crate::scalar::Scalar::ONE, &e.right_act(f, &m.col(j)));
        }
        if acc != linalg::unit(de, j) {
            return Err(Error::NotProjective(format!("Σ fⁱ·f_i(e{j}) = {} differs from e{j}", linalg::fmt_vector(&acc))));
        }
    }
    Ok(Dual { of, atom, names, funcs, ev, coev, forms: forms.to_vec(), fields: field_coords, field_funcs: fields })
}

impl Dual {
    /// `(ev ⊗ id)(v ⊗ coev(1)) = v` for every basis `v` of `E*`.
    pub fn zigzag_dual(&self, sp: &Spaces) -> std::result::Result<(), String> {
        let dv = sp.dim(&[self.atom]);
        for i in 0..dv {
            let v = linalg::unit(dv, i);
            let t = sp.tensor(&[self.atom], &v, &[self.of, self.atom], &self.coev);
            let out = sp.apply_at(&[self.atom, self.of, self.atom], 0, 2, &self.ev, &[], &t);
            if out != v {
                return Err(format!("(ev⊗id)(v⊗coev(1)) != v at v = {}", self.names[i]));
            }
        }
        Ok(())
    }

    /// `(id ⊗ ev)(coev(1) ⊗ e) = e` for every basis `e` of `E`.
    pub fn zigzag_module(&self, sp: &Spaces) -> std::result::Result<(), String> {
        let de = sp.dim(&[self.of]);
        for j in 0..de {
            let e = linalg::unit(de, j);
            let t = sp.tensor(&[self.of, self.atom], &self.coev, &[self.of], &e);
            let out = sp.apply_at(&[self.of, self.atom, self.of], 1, 3, &self.ev, &[], &t);
            if out != e {
                return Err(format!("(id⊗ev)(coev(1)⊗e) != e at basis element {j}"));
            }
        }
        Ok(())
    }

    /// The matrix `P_{qj} = f_q(fʲ)` over `A` is idempotent.
    pub fn idempotent(&self, sp: &Spaces) -> std::result::Result<(), String> {
        let alg = sp.algebra();
        let k = self.forms.len();
        let p: Vec<Vec<Vector>> =
            (0..k).map(|q| (0..k).map(|j| self.field_funcs[q].mul_vec(&self.forms[j])).collect()).collect();
        for q in 0..k {
            for l in 0..k {
                let mut s = linalg::zeros(alg.dim());
                for j in 0..k {
                    linalg::axpy(&mut s, &crate::scalar::Scalar::ONE, &alg.mul(&p[q][j], &p[j][l]));
                }
                if s != p[q][l] {
                    return Err(format!("(P²)[{q}][{l}] != P[{q}][{l}]"));
                }
            }
        }
        Ok(())
    }
}
