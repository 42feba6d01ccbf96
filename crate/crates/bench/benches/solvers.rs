use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pf_bench::{natural, unit_box};
use pf_core::quadrature::integrate;
use pf_core::relativity::{verify_invariance, InvarianceConfig};
use pf_core::spectral::{auto_bracket, solve_box_analytic, solve_fd, solve_shooting, ShootingOptions};

fn spectral(c: &mut Criterion) {
    let problem = unit_box();
    let k = natural();
    c.bench_function("analytic box, 10 levels", |b| {
        b.iter(|| solve_box_analytic(black_box(1.0), std::f64::consts::PI, 10, &k).unwrap())
    });
    c.bench_function("fd box, 2000 points, 3 levels", |b| {
        b.iter(|| solve_fd(black_box(&problem), 2000, 3, &k).unwrap())
    });
    let bracket = auto_bracket(&problem, 3, 2000, &k).unwrap();
    let options = ShootingOptions::new(bracket, 3);
    c.bench_function("shooting box, 3 levels", |b| {
        b.iter(|| solve_shooting(black_box(&problem), &options, &k).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    c.bench_function("adaptive quadrature", |b| {
        b.iter(|| integrate(|x: f64| (1.0 + x * x).sqrt().recip(), 0.0, black_box(100.0), 1e-12).unwrap())
    });
}

fn invariance(c: &mut Criterion) {
    let config = InvarianceConfig { samples: 1000, high_gamma_samples: 1000, ..InvarianceConfig::default() };
    c.bench_function("invariance check, 2000 contexts", |b| {
        b.iter(|| verify_invariance(black_box(&config)).unwrap())
    });
}

criterion_group!(benches, spectral, quadrature, invariance);
criterion_main!(benches);
