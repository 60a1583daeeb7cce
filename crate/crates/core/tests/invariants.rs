use std::sync::OnceLock;

use ncdiff::linalg::{self, quadratic_form, Vector};
use ncdiff::verify::{verify_all, Options};
use ncdiff::scalar::Rat;
use ncdiff::{builtins, Bundle, Geometry, GradedOperator, Scalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_point() -> &'static Geometry {
    static G: OnceLock<Geometry> = OnceLock::new();
    G.get_or_init(|| Geometry::from_bundle(&builtins::two_point(), None).unwrap())
}

fn z3() -> &'static Geometry {
    static G: OnceLock<Geometry> = OnceLock::new();
    G.get_or_init(|| Geometry::from_bundle(&builtins::z3(), Some(2)).unwrap())
}

fn random(g: &Geometry, degree: usize, seed: u64) -> GradedOperator {
    GradedOperator::random(g, degree, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn small_vector() -> impl Strategy<Value = Vector> {
    proptest::collection::vec((-4i64..5, 1i64..4), 2).prop_map(|v| v.into_iter().map(|(p, q)| Scalar::ratio(p, q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bullet_is_associative(seed in any::<u64>(), dx in 0usize..=1, dy in 0usize..=1) {
        let g = two_point();
        let (x, y, z) = (random(g, dx, seed), random(g, dy, seed ^ 1), random(g, 1, seed ^ 2));
        let left = g.bullet(&g.bullet(&x, &y).unwrap(), &z).unwrap();
        let right = g.bullet(&x, &g.bullet(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn bullet_is_associative_on_z3(seed in any::<u64>()) {
        let g = z3();
        let (x, y, z) = (random(g, 1, seed), random(g, 1, seed ^ 1), random(g, 0, seed ^ 2));
        let left = g.bullet(&g.bullet(&x, &y).unwrap(), &z).unwrap();
        let right = g.bullet(&x, &g.bullet(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn unit_is_two_sided(seed in any::<u64>()) {
        let g = two_point();
        let x = random(g, 3, seed);
        let one = GradedOperator::one(g);
        prop_assert_eq!(g.bullet(&one, &x).unwrap(), x.clone());
        prop_assert_eq!(g.bullet(&x, &one).unwrap(), x);
    }

    #[test]
    fn action_composes(seed in any::<u64>(), e in small_vector(), module in 0usize..4) {
        let g = two_point();
        let m = g.modules[module].clone();
        let (x, y) = (random(g, 1, seed), random(g, 2, seed ^ 7));
        let lhs = g.act(&m, &x, &g.act(&m, &y, &e));
        let rhs = g.act(&m, &g.bullet(&x, &y).unwrap(), &e);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_is_linear(seed in any::<u64>(), e in small_vector(), f in small_vector()) {
        let g = two_point();
        let m = g.module("Ω¹").unwrap();
        let x = random(g, 3, seed);
        prop_assert_eq!(g.act(&m, &x, &linalg::add(&e, &f)), linalg::add(&g.act(&m, &x, &e), &g.act(&m, &x, &f)));
    }

    #[test]
    fn sobolev_norms_increase(x in small_vector(), module in prop::sample::select(vec!["A", "Ω¹", "L"]), n in 0usize..3) {
        let g = two_point();
        let m = g.module(module).unwrap();
        let ip = g.inner_product(module).unwrap();
        for s in &g.states {
            let lo = g.sobolev_gram_matrix(&m, ip, s, n).unwrap();
            let hi = g.sobolev_gram_matrix(&m, ip, s, n + 1).unwrap();
            let (a, b) = (quadratic_form(&lo, &x), quadratic_form(&hi, &x));
            prop_assert!(a.is_real() && b.is_real());
            prop_assert!(a.re >= Rat::new(0, 1));
            prop_assert!(b.re >= a.re);
        }
    }
}

#[test]
fn bundles_round_trip() {
    for b in builtins::all() {
        let text = b.to_json();
        let back = Bundle::from_json(&text).unwrap();
        // Empty matrices carry no shape in JSON, so compare serialisations.
        assert_eq!(back.to_json(), text);
        assert_eq!(back.digest(), b.digest());
        Geometry::from_bundle(&back, None).unwrap();
    }
}

#[test]
fn reports_are_deterministic() {
    let b = builtins::two_point();
    let opts = Options { suites: vec!["bullet".into(), "theta".into(), "sobolev".into()], seed: 42 };
    let g1 = Geometry::from_bundle(&b, None).unwrap();
    let g2 = Geometry::from_bundle(&b, None).unwrap();
    let (r1, _) = verify_all(&b, &g1, &opts).unwrap();
    let (r2, _) = verify_all(&b, &g2, &opts).unwrap();
    assert!(r1.passed);
    assert_eq!(r1.body_json(), r2.body_json());
}
