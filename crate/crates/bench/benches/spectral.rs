use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qpow::bounds::BoundId;
use qpow::connectivity::vertex_connectivity;
use qpow::search::{enumerate_graphs, scan, spectral_key, GraphFilter};
use qpow::spectra::q_spectrum;
use qpow::{Alpha, BoundSelector, MatrixKind, ScanConfig};
use qpow_bench::fixtures;

fn eigensolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("q_spectrum");
    for n in [8, 16, 32, 64] {
        for (name, g) in fixtures(n) {
            group.bench_with_input(BenchmarkId::new(name, n), &g, |b, g| {
                b.iter(|| q_spectrum(black_box(g)).unwrap())
            });
        }
    }
    group.finish();
}

fn key(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral_key");
    for n in [6, 9, 12] {
        for (name, g) in fixtures(n) {
            group.bench_with_input(BenchmarkId::new(name, n), &g, |b, g| {
                b.iter(|| spectral_key(black_box(g.rows()), MatrixKind::SignlessLaplacian))
            });
        }
    }
    group.finish();
}

fn connectivity(c: &mut Criterion) {
    let mut group = c.benchmark_group("vertex_connectivity");
    for n in [8, 16, 32] {
        for (name, g) in fixtures(n) {
            group.bench_with_input(BenchmarkId::new(name, n), &g, |b, g| {
                b.iter(|| vertex_connectivity(black_box(g)))
            });
        }
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate_connected_6", |b| {
        b.iter(|| enumerate_graphs(6, GraphFilter::Connected).unwrap().count())
    });
}

fn small_scan(c: &mut Criterion) {
    let alpha = Alpha::new(2.0).unwrap();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("thm43_n6", |b| {
        let cfg = ScanConfig::new(
            BoundSelector::Id(BoundId::ConnectivityUpper),
            6,
            vec![alpha],
        );
        b.iter(|| scan(&cfg).unwrap())
    });
    group.bench_function("thm32_n7", |b| {
        let cfg = ScanConfig::new(
            BoundSelector::Id(BoundId::BalancedUpper),
            7,
            vec![Alpha::new(0.5).unwrap()],
        );
        b.iter(|| scan(&cfg).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    eigensolve,
    key,
    connectivity,
    enumeration,
    small_scan
);
criterion_main!(benches);
