use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use frob7_core::congruence::verify_theorem;
use frob7_core::operators::appendix::{verify_appendix, Group, VERIFICATION_FLOOR};
use frob7_core::par::{with_mode, Mode};
use frob7_core::QSeries;

const MODES: [(&str, Mode); 2] = [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)];

fn multiply(c: &mut Criterion) {
    let mut group = c.benchmark_group("series_product");
    for n in [500i64, 2000] {
        let a = QSeries::from_i64s(0, &(1..=n).map(|k| k % 97 - 48).collect::<Vec<_>>(), n);
        let b = QSeries::from_i64s(0, &(1..=n).map(|k| k % 89 - 44).collect::<Vec<_>>(), n);
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |bench, _| {
                bench.iter(|| with_mode(mode, || &a * &b))
            });
        }
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("theorem_sweep");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new(name, "beta1_alpha1_n300"), |bench| {
            bench.iter(|| with_mode(mode, || verify_theorem(1, 1, 300).unwrap()))
        });
    }
    group.finish();
}

fn appendix(c: &mut Criterion) {
    let mut group = c.benchmark_group("appendix_group_iv");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(name, |bench| {
            bench.iter(|| with_mode(mode, || verify_appendix(&[Group::IV], VERIFICATION_FLOOR).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, multiply, sweeps, appendix);
criterion_main!(benches);
