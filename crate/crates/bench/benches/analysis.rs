use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lpvlfr::{
    equivalent_to_lpv_lfr, find_lfr_isomorphism, is_minimal_lfr, lfr_formal_comparison, lfr_series_table,
    minimize_lfr,
};
use lpvlfr_bench::{lfr_pair, tol};

fn series(c: &mut Criterion) {
    let (m, _) = lfr_pair(2, 3);
    let mut group = c.benchmark_group("series_table");
    for horizon in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |b, &h| {
            b.iter(|| lfr_series_table(black_box(&m), h))
        });
    }
    group.finish();
}

fn structure(c: &mut Criterion) {
    let (m, padded) = lfr_pair(2, 3);
    c.bench_function("is_minimal_lfr", |b| b.iter(|| is_minimal_lfr(black_box(&padded), &tol())));
    c.bench_function("minimize_lfr", |b| b.iter(|| minimize_lfr(black_box(&padded), &tol()).unwrap()));
    c.bench_function("formal_comparison", |b| {
        b.iter(|| lfr_formal_comparison(black_box(&m), black_box(&padded), &tol()).unwrap())
    });
    c.bench_function("forbidden_word_check", |b| b.iter(|| equivalent_to_lpv_lfr(black_box(&padded), &tol())));
    let (min, _) = minimize_lfr(&padded, &tol()).unwrap();
    c.bench_function("find_lfr_isomorphism", |b| {
        b.iter(|| find_lfr_isomorphism(black_box(&m), black_box(&min), &tol()).unwrap())
    });
}

criterion_group!(benches, series, structure);
criterion_main!(benches);
