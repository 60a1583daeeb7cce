//! Built-in example bundles, generated from closed formulas.
//!
//! All three use functions on a finite set with pointwise product, basis `δ_x`.
//! The universal calculus has basis `ω_{xy}` (`x ≠ y`), with `δ_a·ω_{xy} = [a = x]ω_{xy}`,
//! `ω_{xy}·δ_b = [b = y]ω_{xy}` and `df = Σ (f(y) − f(x))·ω_{xy} = [θ, f]` for
//! `θ = Σ ω_{xy}`. The dual basis pairs `ω_e` with `f_e(ω_{e'}) = [e = e']·δ_{target(e)}`.
//!
//! For any invertible bimodule map `σ⁻¹` of `Ω¹ ⊗_A Ω¹`, `□ξ = σ⁻¹(θ⊗ξ) − ξ⊗θ` obeys
//! both Leibniz rules of a right connection: `□(ξa) − □ξ·a = ξ⊗[θ, a] = ξ⊗da` and
//! `□(aξ) − a·□ξ = σ⁻¹([θ, a]⊗ξ) = σ⁻¹(da⊗ξ)`. Bimodule maps of `Ω¹ ⊗_A Ω¹` are exactly
//! the maps that preserve the endpoints of two-step paths `x → y → z`, so `σ⁻¹` is
//! chosen by assigning coefficients among paths with equal endpoints.

use crate::bundle::{
    AlgebraSpec, BimoduleSpec, Bundle, DualBasisSpec, InnerProductSpec, ModuleSpec, RightConnectionSpec, StateSpec, FORMAT,
};
use crate::linalg::{self, Mat};
use crate::scalar::{Field, Scalar};

pub const NAMES: [&str; 3] = ["two-point-universal", "z3-universal", "degenerate"];

pub fn builtin(name: &str) -> Option<Bundle> {
    match name {
        "two-point-universal" => Some(two_point()),
        "z3-universal" => Some(z3()),
        "degenerate" => Some(degenerate()),
        _ => None,
    }
}

pub fn all() -> Vec<Bundle> {
    NAMES.iter().filter_map(|n| builtin(n)).collect()
}

struct Universal {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Universal {
    fn new(n: usize) -> Universal {
        let edges = (0..n).flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y))).collect();
        Universal { n, edges }
    }

    fn de(&self) -> usize {
        self.edges.len()
    }

    fn edge(&self, x: usize, y: usize) -> usize {
        self.edges.iter().position(|&e| e == (x, y)).expect("an edge")
    }

    fn algebra(&self) -> AlgebraSpec {
        let n = self.n;
        AlgebraSpec {
            basis: (0..n).map(|x| format!("δ{x}")).collect(),
            unit: vec![Scalar::ONE; n],
            mul: (0..n).map(|i| (0..n).map(|j| if i == j { linalg::unit(n, i) } else { linalg::zeros(n) }).collect()).collect(),
            star: Some(Mat::identity(n)),
        }
    }

    fn omega(&self) -> BimoduleSpec {
        let de = self.de();
        let diag = |f: &dyn Fn(usize) -> bool| {
            let mut m = Mat::zeros(de, de);
            for e in 0..de {
                if f(e) {
                    m.set(e, e, Scalar::ONE);
                }
            }
            m
        };
        BimoduleSpec {
            basis: self.edges.iter().map(|(x, y)| format!("ω{x}{y}")).collect(),
            left: (0..self.n).map(|a| diag(&|e| self.edges[e].0 == a)).collect(),
            right: (0..self.n).map(|b| diag(&|e| self.edges[e].1 == b)).collect(),
        }
    }

    fn d(&self) -> Mat {
        let mut d = Mat::zeros(self.de(), self.n);
        for (e, &(x, y)) in self.edges.iter().enumerate() {
            *d.at_mut(e, y) += &Scalar::ONE;
            *d.at_mut(e, x) -= &Scalar::ONE;
        }
        d
    }

    fn dual_basis(&self) -> DualBasisSpec {
        let de = self.de();
        DualBasisSpec {
            forms: (0..de).map(|e| linalg::unit(de, e)).collect(),
            fields: (0..de)
                .map(|e| {
                    let mut m = Mat::zeros(self.n, de);
                    m.set(self.edges[e].1, e, Scalar::ONE);
                    m
                })
                .collect(),
            names: self.edges.iter().map(|(x, y)| format!("f{x}{y}")).collect(),
        }
    }

    /// Plain index of `ω_{xy} ⊗ ω_{yz}`.
    fn path(&self, x: usize, y: usize, z: usize) -> usize {
        self.edge(x, y) * self.de() + self.edge(y, z)
    }

    fn paths(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for x in 0..n {
            for y in (0..n).filter(|&y| y != x) {
                for z in (0..n).filter(|&z| z != y) {
                    out.push((x, y, z));
                }
            }
        }
        out
    }

    /// `σ⁻¹` from the images of two-step paths, and `□ξ = σ⁻¹(θ⊗ξ) − ξ⊗θ`.
    fn right_connection(&self, image: impl Fn(usize, usize, usize) -> Vec<(usize, Scalar)>) -> RightConnectionSpec {
        let de = self.de();
        let mut sigma_inv = Mat::zeros(de * de, de * de);
        for (x, y, z) in self.paths() {
            for (y2, c) in image(x, y, z) {
                *sigma_inv.at_mut(self.path(x, y2, z), self.path(x, y, z)) += &c;
            }
        }
        let mut boxm = Mat::zeros(de * de, de);
        for (e, &(y, z)) in self.edges.iter().enumerate() {
            let mut theta_xi = linalg::zeros(de * de);
            for x in (0..self.n).filter(|&x| x != y) {
                theta_xi[self.path(x, y, z)] = Scalar::ONE;
            }
            let mut col = sigma_inv.mul_vec(&theta_xi);
            for w in (0..self.n).filter(|&w| w != z) {
                col[self.path(y, z, w)] -= &Scalar::ONE;
            }
            for (r, c) in col.into_iter().enumerate() {
                boxm.set(r, e, c);
            }
        }
        RightConnectionSpec { box_: boxm, sigma_inv }
    }

    /// `⟨δ_x, δ̄_y⟩ = δ_x·δ_y*`.
    fn algebra_inner_product(&self, module: &str) -> InnerProductSpec {
        let n = self.n;
        InnerProductSpec {
            module: module.to_string(),
            gram: (0..n).map(|i| (0..n).map(|j| if i == j { linalg::unit(n, i) } else { linalg::zeros(n) }).collect()).collect(),
        }
    }

    /// `⟨ω_e, ω̄_{e'}⟩ = [e = e']·g_e·δ_{source(e)}`.
    fn omega_inner_product(&self, module: &str, weight: impl Fn(usize, usize) -> Scalar) -> InnerProductSpec {
        let de = self.de();
        InnerProductSpec {
            module: module.to_string(),
            gram: (0..de)
                .map(|i| {
                    (0..de)
                        .map(|j| {
                            let (x, y) = self.edges[i];
                            if i == j {
                                linalg::scale(&weight(x, y), &linalg::unit(self.n, x))
                            } else {
                                linalg::zeros(self.n)
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    fn states(&self) -> Vec<StateSpec> {
        vec![
            StateSpec { name: "uniform".into(), functional: vec![Scalar::ratio(1, self.n as i64); self.n] },
            StateSpec { name: "point0".into(), functional: linalg::unit(self.n, 0) },
        ]
    }

    /// The algebra as a module with `∇a = da + λ·a·θ` and `σ(a⊗ξ) = (1 − λ)·aξ ⊗ 1`.
    fn twisted_line(&self, name: &str, lambda: Scalar) -> ModuleSpec {
        let (n, de) = (self.n, self.de());
        // Ω¹ ⊗_K L has plain index e·n + p, and ω_e ⊗ 1 is represented by ω_e ⊗ δ_{target(e)}.
        let lift = |e: usize| e * n + self.edges[e].1;
        let d = self.d();
        let mut nabla = Mat::zeros(de * n, n);
        for p in 0..n {
            for e in 0..de {
                let mut c = d.get(e, p).clone();
                if self.edges[e].0 == p {
                    c += &lambda;
                }
                nabla.set(lift(e), p, c);
            }
        }
        let mut sigma = Mat::zeros(de * n, n * de);
        let one_minus = &Scalar::ONE - &lambda;
        for p in 0..n {
            for e in 0..de {
                if self.edges[e].0 == p {
                    sigma.set(lift(e), p * de + e, one_minus.clone());
                }
            }
        }
        let alg = self.algebra();
        let left = (0..n).map(|a| mult_matrix(&alg, a, true)).collect();
        let right = (0..n).map(|a| mult_matrix(&alg, a, false)).collect();
        ModuleSpec::Custom { name: name.to_string(), basis: alg.basis.clone(), left, right, nabla, sigma: Some(sigma) }
    }
}

fn mult_matrix(alg: &AlgebraSpec, a: usize, left: bool) -> Mat {
    let n = alg.basis.len();
    Mat::from_fn_cols(n, n, |j| if left { alg.mul[a][j].clone() } else { alg.mul[j][a].clone() })
}

fn standard_modules() -> Vec<ModuleSpec> {
    vec![
        ModuleSpec::Algebra { name: "A".into() },
        ModuleSpec::Omega1 { name: "Ω¹".into() },
        ModuleSpec::Vec { name: "Vec".into() },
    ]
}

/// Universal calculus on two points. The only two-step paths are `0→1→0` and
/// `1→0→1`, each alone with its endpoints, so `σ⁻¹` is diagonal; the scalars 2 and
/// −1/2 keep it away from the identity.
pub fn two_point() -> Bundle {
    let u = Universal::new(2);
    let rc = u.right_connection(|x, y, _| vec![(y, if x == 0 { Scalar::from_int(2) } else { Scalar::ratio(-1, 2) })]);
    let mut modules = standard_modules();
    modules.push(u.twisted_line("L", Scalar::ratio(1, 2)));
    Bundle {
        format: FORMAT.into(),
        name: "two-point-universal".into(),
        field: Field::Rational,
        degree: 3,
        description: "Universal calculus on two points. σ⁻¹ scales the path 0→1→0 by 2 and 1→0→1 by -1/2; □ξ = σ⁻¹(θ⊗ξ) - ξ⊗θ with θ = ω01 + ω10. L is the algebra with ∇a = da + a·θ/2 and σ(a⊗ξ) = aξ⊗1/2."
            .into(),
        algebra: u.algebra(),
        omega1: u.omega(),
        d: u.d(),
        dual_basis: u.dual_basis(),
        right_connection: rc,
        modules,
        inner_products: vec![
            u.algebra_inner_product("A"),
            u.omega_inner_product("Ω¹", |x, _| Scalar::from_int(x as i64 + 1)),
            u.algebra_inner_product("L"),
        ],
        states: u.states(),
    }
}

/// Functions on ℤ₃ with the calculus spanned over `A` by the steps `+1` and `+2`.
/// `σ⁻¹` swaps the order of the steps, `x → x+a → x+a+b ↦ q_{ab}·(x → x+b → x+a+b)`,
/// with `q₁₁ = −1`, `q₂₂ = 1`, `q₁₂ = 2`, `q₂₁ = 1/3`.
pub fn z3() -> Bundle {
    let u = Universal::new(3);
    let q = |a: usize, b: usize| match (a, b) {
        (1, 1) => Scalar::from_int(-1),
        (2, 2) => Scalar::ONE,
        (1, 2) => Scalar::from_int(2),
        _ => Scalar::ratio(1, 3),
    };
    let rc = u.right_connection(|x, y, z| {
        let (a, b) = ((y + 3 - x) % 3, (z + 3 - y) % 3);
        vec![((x + b) % 3, q(a, b))]
    });
    Bundle {
        format: FORMAT.into(),
        name: "z3-universal".into(),
        field: Field::Rational,
        degree: 3,
        description: "Functions on Z3 with the steps +1 and +2, which is the universal calculus on three points. σ⁻¹ sends x→x+a→x+a+b to q_ab·(x→x+b→x+a+b) with q11 = -1, q22 = 1, q12 = 2, q21 = 1/3; □ξ = σ⁻¹(θ⊗ξ) - ξ⊗θ with θ the sum of all edges."
            .into(),
        algebra: u.algebra(),
        omega1: u.omega(),
        d: u.d(),
        dual_basis: u.dual_basis(),
        right_connection: rc,
        modules: standard_modules(),
        inner_products: vec![u.algebra_inner_product("A"), u.omega_inner_product("Ω¹", |_, _| Scalar::ONE)],
        states: u.states(),
    }
}

/// Functions on two points with the zero calculus.
pub fn degenerate() -> Bundle {
    let u = Universal::new(2);
    let empty = |n: usize| -> Vec<Mat> { vec![Mat::zeros(0, 0); n] };
    Bundle {
        format: FORMAT.into(),
        name: "degenerate".into(),
        field: Field::Rational,
        degree: 3,
        description: "Functions on two points with Ω¹ = 0. Every space of forms and vector fields is zero; only the order-zero parts of the checks are nontrivial.".into(),
        algebra: u.algebra(),
        omega1: BimoduleSpec { basis: vec![], left: empty(2), right: empty(2) },
        d: Mat::zeros(0, 2),
        dual_basis: DualBasisSpec { forms: vec![], fields: vec![], names: vec![] },
        right_connection: RightConnectionSpec { box_: Mat::zeros(0, 0), sigma_inv: Mat::zeros(0, 0) },
        modules: vec![ModuleSpec::Algebra { name: "A".into() }],
        inner_products: vec![u.algebra_inner_product("A")],
        states: u.states(),
    }
}

