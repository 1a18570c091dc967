use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qjd_bench::generic_tuple;
use qjd_core::jointdist::{qjd_joint, sequential_joint, wasserstein1};
use qjd_core::spectral::DEFAULT_CLUSTER_TOL;
use qjd_core::{eigendecompose, QjdConfig};

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigendecompose");
    for dim in [2, 4, 6, 16] {
        let (obs, _) = generic_tuple(dim, 1, 11);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &obs[0], |b, a| {
            b.iter(|| eigendecompose(black_box(a), DEFAULT_CLUSTER_TOL).unwrap())
        });
    }
    group.finish();
}

fn joint(c: &mut Criterion) {
    let config = QjdConfig::default();
    let mut group = c.benchmark_group("qjd_joint");
    for (dim, n) in [(2, 2), (4, 2), (4, 3), (6, 3), (4, 5)] {
        let (obs, rho) = generic_tuple(dim, n, 12);
        group.bench_function(BenchmarkId::from_parameter(format!("d{dim}_n{n}")), |b| {
            b.iter(|| qjd_joint(black_box(&obs), black_box(&rho), &config).unwrap())
        });
    }
    group.finish();

    let (obs, rho) = generic_tuple(6, 3, 12);
    c.bench_function("sequential_joint/d6_n3", |b| {
        b.iter(|| sequential_joint(black_box(&obs), black_box(&rho), &config).unwrap())
    });
}

fn transport(c: &mut Criterion) {
    let config = QjdConfig::default();
    let mut group = c.benchmark_group("wasserstein1");
    for (dim, n) in [(3, 2), (6, 2), (6, 3)] {
        let (obs, rho) = generic_tuple(dim, n, 13);
        let (other, _) = generic_tuple(dim, n, 14);
        let a = qjd_joint(&obs, &rho, &config).unwrap();
        let b = qjd_joint(&other, &rho, &config).unwrap();
        group.bench_function(
            BenchmarkId::from_parameter(format!("support{}", a.grid().len())),
            |bench| bench.iter(|| wasserstein1(black_box(&a), black_box(&b)).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, spectral, joint, transport);
criterion_main!(benches);
