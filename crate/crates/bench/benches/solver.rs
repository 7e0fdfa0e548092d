use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

use qes_bench::system;
use qes_core::scalar::Mp128;
use qes_core::solver::{newton_polish, solve_all, sweep, Strategy};

fn bench_solve_all(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_all");
    g.sample_size(10);
    for n in [1usize, 2, 3] {
        for ell in [0.5, 2.5] {
            let sys = system(n, ell);
            g.bench_with_input(BenchmarkId::new(format!("N{n}"), ell), &sys, |b, sys| {
                b.iter(|| solve_all(black_box(sys), Strategy::Continuation).unwrap())
            });
        }
    }
    g.finish();
}

fn bench_newton(c: &mut Criterion) {
    let sys = system(3, 2.5);
    let s = solve_all(&sys, Strategy::Continuation).unwrap().solutions[0].clone();
    let seed = (s.energy * (1.0 + 1e-4), s.charge + Complex64::new(1e-4, 0.0));
    c.bench_function("newton_polish N3", |b| b.iter(|| newton_polish(black_box(&sys), seed).unwrap()));
}

fn bench_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    let grid = [1e2, 1e3, 1e4, 1e5, 1e6];
    g.bench_function("N3 k0 f64", |b| b.iter(|| sweep(&0.5f64, &(1.0 / 3.0), 3, 0, black_box(&grid)).unwrap()));
    let (beta, gamma): (Mp128, Mp128) = (qes_core::Real::from_f64(0.5), qes_core::Real::from_f64(1.0 / 3.0));
    g.bench_function("N3 k0 Mp128", |b| b.iter(|| sweep(&beta, &gamma, 3, 0, black_box(&grid)).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_solve_all, bench_newton, bench_sweep);
criterion_main!(benches);
