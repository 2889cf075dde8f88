//! Rayon pool against a one-thread pool on the data-parallel kernels.
//! Build with `--no-default-features` to time the plain sequential path.

use std::hint::black_box;

use coarse_lab::coarse::{self, PointMap, ScalarFunction};
use coarse_lab::cone::{compactification_diagnostic, BaseGraph, ConeGrid, ConeSpace, LambdaFunction};
use coarse_lab::odometer;
use coarse_lab::spaces::SpaceHandle;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;

fn pools() -> Vec<(String, ThreadPool)> {
    let n = rayon::current_num_threads();
    let mut out = vec![("1-thread".to_string(), rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    if n > 1 {
        out.push((format!("{n}-threads"), rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()));
    }
    out
}

fn bench_odometer(c: &mut Criterion) {
    let mut g = c.benchmark_group("odometer_lipschitz_scan");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, 7), |b| {
            b.iter(|| pool.install(|| black_box(odometer::lipschitz_scan(7))))
        });
    }
    g.finish();
}

fn bench_bornologous(c: &mut Criterion) {
    let f2 = SpaceHandle::free_group();
    let f = PointMap::identity();
    let mut g = c.benchmark_group("bornologous_profile_f2");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, 4), |b| {
            b.iter(|| pool.install(|| black_box(coarse::bornologous_profile(&f, &f2, &f2, &[1.0, 2.0, 4.0], 4.0).unwrap())))
        });
    }
    g.finish();
}

fn bench_higson(c: &mut Criterion) {
    let z = SpaceHandle::integer_lattice(1);
    let f = ScalarFunction::builtin("sin-log-norm", &z).unwrap();
    let mut g = c.benchmark_group("higson_defect_z");
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, 2000), |b| {
            b.iter(|| pool.install(|| black_box(coarse::higson_defect(&f, &z, 5.0, &[10.0, 100.0, 1000.0], 2000.0).unwrap())))
        });
    }
    g.finish();
}

fn bench_cone(c: &mut Criterion) {
    let base = BaseGraph::cycle(16, 1.0 / 16.0).unwrap();
    let grid = ConeGrid::geometric(base, 128.0, 2).unwrap();
    let cone = ConeSpace::new(grid, LambdaFunction::Linear);
    let mut g = c.benchmark_group("cone_diagnostic");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, 128), |b| {
            b.iter(|| pool.install(|| black_box(compactification_diagnostic(&cone, 5.0, &[8.0, 64.0], 0.1).unwrap())))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_odometer, bench_bornologous, bench_higson, bench_cone);
criterion_main!(benches);
