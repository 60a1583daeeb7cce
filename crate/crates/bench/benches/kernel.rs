use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ncdiff::{builtins, linalg, Geometry};
use ncdiff_bench::{dense_operator, geometry};

fn load(c: &mut Criterion) {
    let b = builtins::z3();
    c.bench_function("load z3", |bench| bench.iter(|| Geometry::from_bundle(black_box(&b), None).unwrap()));
}

fn bullet(c: &mut Criterion) {
    for (name, degree) in [("two-point-universal", None), ("z3-universal", Some(2))] {
        let g = geometry(name, degree);
        let d = g.degree;
        let (x, y) = (dense_operator(&g, d - d / 2, 1), dense_operator(&g, d / 2, 2));
        g.bullet(&x, &y).unwrap();
        c.bench_function(&format!("bullet {name}"), |bench| bench.iter(|| g.bullet(black_box(&x), black_box(&y)).unwrap()));
    }
}

fn action(c: &mut Criterion) {
    let g = geometry("two-point-universal", None);
    let m = g.module("Ω¹").unwrap();
    let x = dense_operator(&g, 3, 1);
    let e = linalg::unit(m.dim(&g), 0);
    c.bench_function("action Ω¹", |bench| bench.iter(|| g.act(&m, black_box(&x), black_box(&e))));
}

fn theta(c: &mut Criterion) {
    let g = geometry("two-point-universal", None);
    let m = g.module("Ω¹").unwrap();
    let v = linalg::unit(g.dim_fields(3), g.dim_fields(3) - 1);
    let e = linalg::unit(m.dim(&g), 1);
    g.theta_apply(&m, 3, &v, &e).unwrap();
    c.bench_function("theta Ω¹ n = 3", |bench| bench.iter(|| g.theta_apply(&m, 3, black_box(&v), black_box(&e)).unwrap()));
}

fn gram(c: &mut Criterion) {
    let g = geometry("two-point-universal", None);
    c.bench_function("gram Ω¹ n = 3", |bench| bench.iter(|| g.sobolev_gram(black_box("Ω¹"), "uniform", 3).unwrap()));
}

fn zigzag(c: &mut Criterion) {
    c.bench_function("zigzag z3 n = 3", |bench| {
        bench.iter_with_setup(|| geometry("z3-universal", None), |g| g.check_zigzag_n(3).unwrap())
    });
}

criterion_group! {
    name = kernel;
    config = Criterion::default().sample_size(10);
    targets = load, bullet, action, theta, gram, zigzag
}
criterion_main!(kernel);
