//! Values computed from closed formulas for the universal calculus on a finite set
//! and compared with the kernel. Edges `x → y` are ordered lexicographically and
//! `f_{xy}(ω_{x'y'}) = [xy = x'y']·δ_y`.

use ncdiff::linalg::{self, Mat, Vector};
use ncdiff::{builtins, Geometry, Scalar};

fn edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y))).collect()
}

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn delta(n: usize, x: usize) -> Vector {
    linalg::unit(n, x)
}

fn bundles() -> Vec<(Geometry, usize)> {
    vec![(Geometry::from_bundle(&builtins::two_point(), None).unwrap(), 2), (Geometry::from_bundle(&builtins::z3(), None).unwrap(), 3)]
}

#[test]
fn dimensions() {
    // Paths of length k on n points: n·(n−1)^k.
    for (g, n) in bundles() {
        assert_eq!(g.algebra().dim(), n);
        for k in 1..=3 {
            let paths = n * (n - 1).pow(k as u32);
            assert_eq!(g.dim(&g.omega_n(k)), paths);
            assert_eq!(g.dim_fields(k), paths);
        }
    }
    let g = Geometry::from_bundle(&builtins::degenerate(), None).unwrap();
    assert_eq!((g.dim(&[g.omega]), g.dim(&[g.vec]), g.dim_fields(3)), (0, 0, 0));
}

#[test]
fn derivative_of_functions() {
    // df = Σ (f(y) − f(x))·ω_{xy}.
    for (g, n) in bundles() {
        for b in 0..n {
            let expect: Vector = edges(n).iter().map(|&(x, y)| int((y == b) as i64 - (x == b) as i64)).collect();
            assert_eq!(g.d_of(&delta(n, b)), expect);
        }
    }
}

#[test]
fn vector_fields_act_on_functions() {
    // f_{xy} ▷ δ_b = f_{xy}(dδ_b) = ([b = y] − [b = x])·δ_y.
    for (g, n) in bundles() {
        let a = g.module("A").unwrap();
        let es = edges(n);
        for (i, &(x, y)) in es.iter().enumerate() {
            for b in 0..n {
                let got = g.act_homogeneous(&a, 1, &linalg::unit(es.len(), i), &delta(n, b));
                let c = int((b == y) as i64 - (b == x) as i64);
                assert_eq!(got, linalg::scale(&c, &delta(n, y)), "f{x}{y} ▷ δ{b}");
            }
        }
    }
}

#[test]
fn bullet_with_a_function() {
    // f_{xy} • δ_b = f_{xy}·δ_b + f_{xy}(dδ_b), and (f·a)(ξ) = f(a·ξ) gives
    // f_{xy}·δ_b = [b = x]·f_{xy}.
    for (g, n) in bundles() {
        let es = edges(n);
        for (i, &(x, y)) in es.iter().enumerate() {
            let u = linalg::unit(es.len(), i);
            for b in 0..n {
                let parts = g.bullet_right_algebra(1, &u, &delta(n, b));
                assert_eq!(parts[1], linalg::scale(&int((b == x) as i64), &u));
                assert_eq!(parts[0], linalg::scale(&int((b == y) as i64 - (b == x) as i64), &delta(n, y)));
            }
        }
    }
}

#[test]
fn crossing_on_the_algebra_is_the_bullet() {
    // ϑ_A(f01 ⊗ δ0) = f01•δ0 = f01 − δ1 on two points.
    let g = Geometry::from_bundle(&builtins::two_point(), None).unwrap();
    let a = g.module("A").unwrap();
    let f01 = linalg::unit(2, 0);
    let blocks = g.theta_apply(&a, 1, &f01, &delta(2, 0)).unwrap();
    let one = g.algebra().unit().clone();
    assert_eq!(blocks[0], g.spaces.tensor(&[a.atom], &one, &[], &linalg::scale(&int(-1), &delta(2, 1))));
    assert_eq!(blocks[1], g.spaces.tensor(&[a.atom], &one, &[g.vec], &f01));
}

/// `G[i][j] = φ(⟨∇δ_i, ∇δ_j⟩)` for `∇ = d` on `A`, `⟨ω_e, ω_e'⟩ = [e = e']·w(e)·δ_{source(e)}`:
/// `Σ_{x→y} (δ_i(y) − δ_i(x))(δ_j(y) − δ_j(x))·w(x, y)·φ(δ_x)`.
fn first_order_term(n: usize, w: impl Fn(usize, usize) -> Scalar, phi: &[Scalar]) -> Mat {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = Scalar::ZERO;
            for (x, y) in edges(n) {
                let di = int((y == i) as i64 - (x == i) as i64);
                let dj = int((y == j) as i64 - (x == j) as i64);
                s += &(&(&(&di * &dj) * &w(x, y)) * &phi[x]);
            }
            m.set(i, j, s);
        }
    }
    m
}

#[test]
fn first_order_sobolev_gram() {
    let cases: Vec<(Geometry, usize, Box<dyn Fn(usize, usize) -> Scalar>)> = vec![
        (Geometry::from_bundle(&builtins::two_point(), None).unwrap(), 2, Box::new(|x, _| int(x as i64 + 1))),
        (Geometry::from_bundle(&builtins::z3(), None).unwrap(), 3, Box::new(|_, _| Scalar::ONE)),
    ];
    for (g, n, w) in cases {
        let a = g.module("A").unwrap();
        let ip = g.inner_product("A").unwrap();
        for st in &g.states {
            let zeroth = Mat::from_fn_cols(n, n, |j| linalg::scale(&st.functional[j], &delta(n, j)));
            assert_eq!(g.sobolev_term(&a, ip, st, 0).unwrap(), zeroth);
            assert_eq!(g.sobolev_term(&a, ip, st, 1).unwrap(), first_order_term(n, &w, &st.functional));
        }
    }
}

#[test]
fn frozen_two_point_gram() {
    // From the closed form: Gram(1) of A under the uniform state.
    let g = Geometry::from_bundle(&builtins::two_point(), None).unwrap();
    let s = g.sobolev_gram("A", "uniform", 1).unwrap();
    let h = Scalar::ratio(3, 2);
    assert_eq!(s.gram, Mat::from_rows(vec![vec![int(2), -h.clone()], vec![-h, int(2)]], 2));
    assert!(s.strictly_positive);
}

#[test]
fn coevaluation_is_the_sum_over_edges() {
    // coev(1) = Σ_e ω_e ⊗ f_e.
    for (g, n) in bundles() {
        let es = edges(n);
        let mut expect = linalg::zeros(g.dim(&[g.omega, g.vec]));
        for i in 0..es.len() {
            let t = g.spaces.tensor(&[g.omega], &linalg::unit(es.len(), i), &[g.vec], &linalg::unit(es.len(), i));
            expect = linalg::add(&expect, &t);
        }
        assert_eq!(g.dual.coev, expect);
    }
}
