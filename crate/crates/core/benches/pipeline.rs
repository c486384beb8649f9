//! Single-threaded against the default rayon pool on the exact stages.
//!
//! Build with `--no-default-features` to time the pure sequential fallback;
//! in that build both groups run the same code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use kmsolve::catalog;
use kmsolve::par;
use kmsolve::solver::{commuting_matrices, SolveOptions};
use kmsolve::{km_matrix, PrimeField, Rationals};

/// `None` runs on the global pool, sized to the available cores.
fn threads() -> Vec<(&'static str, Option<usize>)> {
    let mut v = vec![("1-thread", Some(1))];
    if par::is_parallel() {
        v.push(("pool", None));
    }
    v
}

fn run<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => par::with_threads(n, f),
        None => f(),
    }
}

fn km_reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("km_reduce_q");
    group.sample_size(10);
    let inst = catalog::del_pezzo_instance(Rationals, 2, 7);
    for (label, n) in threads() {
        group.bench_with_input(BenchmarkId::new("delpezzo2_d5", label), &n, |b, &n| {
            b.iter(|| run(n, || black_box(km_matrix(&inst.sys, 5, true).unwrap().nrows())))
        });
    }
    group.finish();
}

fn multiplication(c: &mut Criterion) {
    let mut group = c.benchmark_group("mult_matrices_fp");
    group.sample_size(10);
    let f = PrimeField::new(9716633).unwrap();
    let inst = catalog::del_pezzo_instance(f, 3, 7);
    let opts = SolveOptions { dreg: Some(7), ..Default::default() };
    for (label, n) in threads() {
        group.bench_with_input(BenchmarkId::new("delpezzo3_d7", label), &n, |b, &n| {
            b.iter(|| run(n, || black_box(commuting_matrices(&inst.sys, &opts).unwrap().mult.delta)))
        });
    }
    group.finish();
}

criterion_group!(benches, km_reduction, multiplication);
criterion_main!(benches);
