use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qes_core::asymptotic::multiplets;
use qes_core::model::rational;
use qes_core::oracle::{exact_solutions_small_n, rescaled_root_scan};

fn bench_asymptotic(c: &mut Criterion) {
    let mut g = c.benchmark_group("asymptotic");
    for n in [2usize, 5, 8] {
        g.bench_with_input(BenchmarkId::new("multiplets", n), &n, |b, &n| b.iter(|| multiplets(black_box(n)).unwrap()));
        g.bench_with_input(BenchmarkId::new("root_scan", n), &n, |b, &n| b.iter(|| rescaled_root_scan(black_box(n)).unwrap()));
    }
    g.finish();
}

fn bench_exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_oracle");
    g.sample_size(10);
    let (beta, gamma) = (rational(1, 2), rational(1, 3));
    for n in [1usize, 2, 3] {
        let ell = rational(5, 2);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| exact_solutions_small_n(black_box(n), &ell, &beta, &gamma).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_asymptotic, bench_exact);
criterion_main!(benches);
