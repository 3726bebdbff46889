use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use semitoeplitz::closure::muckenhoupt_estimate;
use semitoeplitz::measures::{coefficient_table, SymbolTerm, DEFAULT_GRID};
use semitoeplitz::toeplitz::{section_min_eig, toeplitz_apply};
use semitoeplitz_bench::{dense_apply, mixed_coefficients, mixed_measure, random_vector};

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("toeplitz_apply");
    for len in [64usize, 256, 1024, 4096] {
        let t = mixed_coefficients(len);
        let g = random_vector(len, 1);
        group.bench_with_input(BenchmarkId::new("fft", len), &len, |b, &len| {
            b.iter(|| toeplitz_apply(black_box(&t), black_box(&g), len).unwrap())
        });
        if len <= 1024 {
            group.bench_with_input(BenchmarkId::new("dense", len), &len, |b, &len| {
                b.iter(|| dense_apply(black_box(&t), black_box(&g), len))
            });
        }
    }
    group.finish();
}

fn coefficients(c: &mut Criterion) {
    let m = mixed_measure();
    let mut group = c.benchmark_group("coefficient_table");
    for n_max in [128usize, 512] {
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &n_max, |b, &n| {
            b.iter(|| coefficient_table(black_box(&m), n, DEFAULT_GRID).unwrap())
        });
    }
    group.finish();
}

fn min_eig(c: &mut Criterion) {
    let t = mixed_coefficients(256);
    let mut group = c.benchmark_group("section_min_eig");
    group.sample_size(10);
    for order in [16usize, 64, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &n| {
            b.iter(|| section_min_eig(black_box(&t), n).unwrap())
        });
    }
    group.finish();
}

fn muckenhoupt(c: &mut Criterion) {
    let w = SymbolTerm::power(1.5).into();
    c.bench_function("muckenhoupt/grid_16384_levels_8", |b| {
        b.iter(|| muckenhoupt_estimate(black_box(&w), 8, 1 << 14).unwrap())
    });
}

criterion_group!(benches, apply, coefficients, min_eig, muckenhoupt);
criterion_main!(benches);
