use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ptgraph_bench::{broken_loop, grid, island_loop, weak_chain};
use ptgraph_core::stability::{boundary_curve, find_exceptional_point, perturbation_scenarios, scan_z};
use ptgraph_core::{characteristic_polynomial, eigenvalues, metric_from_left_eigenvectors, polynomial_roots};

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues");
    for k in [3, 6, 12] {
        let m = broken_loop(k);
        group.bench_with_input(BenchmarkId::new("loop", m.dim()), &m, |b, m| b.iter(|| eigenvalues(black_box(m))));
    }
    group.finish();
}

fn charpoly_roots(c: &mut Criterion) {
    let mut group = c.benchmark_group("charpoly_roots");
    for k in [3, 6] {
        let m = broken_loop(k);
        group.bench_with_input(BenchmarkId::new("loop", m.dim()), &m, |b, m| {
            b.iter(|| polynomial_roots(&characteristic_polynomial(black_box(m)).unwrap()))
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let z = grid(-4.0, 4.0, 801);
    c.bench_function("scan_z/801", |b| b.iter(|| scan_z(1.035, 0.0, black_box(&z))));
    c.bench_function("find_exceptional_point", |b| {
        b.iter(|| find_exceptional_point(1.035, 0.0, black_box(1.001), 1.1))
    });
    c.bench_function("boundary_curve/101", |b| b.iter(|| boundary_curve(black_box(101))));
    let near = grid(0.9, 1.1, 401);
    c.bench_function("perturbation/401", |b| b.iter(|| perturbation_scenarios(1.035, black_box(&near), 1e-6)));
}

fn metric(c: &mut Criterion) {
    let mut group = c.benchmark_group("metric");
    for (name, m) in [("chain", weak_chain(4)), ("island_loop", island_loop(3))] {
        group.bench_with_input(BenchmarkId::new(name, m.dim()), &m, |b, m| {
            b.iter(|| metric_from_left_eigenvectors(black_box(m), None))
        });
    }
    group.finish();
}

criterion_group!(benches, eigensolver, charpoly_roots, sweeps, metric);
criterion_main!(benches);
