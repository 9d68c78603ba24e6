use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use diagcount_bench::{geometric, BACKEND_CASES};
use diagcount_core::parametric::{family_count_in_cube, sector_count, CubicUnit};
use diagcount_core::tables::{even_moment_with, MomentRoute};
use diagcount_core::{parse_equation, r_table, Backend, Counter, MemoryBudget, Term};

fn backends(c: &mut Criterion) {
    let counter = Counter::default();
    let mut group = c.benchmark_group("count_in_cube");
    group.sample_size(10).measurement_time(Duration::from_secs(5));
    for &(spec, n) in BACKEND_CASES {
        let eq = parse_equation(spec).unwrap();
        for backend in Backend::ALL {
            group.bench_with_input(BenchmarkId::new(backend.name(), spec), &n, |b, &n| {
                b.iter(|| counter.count_in_cube(&eq, n, backend).unwrap())
            });
        }
    }
    group.finish();
}

fn tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("r_table_four_squares");
    group.sample_size(10);
    let terms = [Term::power(2); 4];
    for cap in geometric(1 << 14, 1 << 20, 4) {
        group.bench_with_input(BenchmarkId::from_parameter(cap), &cap, |b, &cap| {
            b.iter(|| r_table(&terms, cap as usize, MemoryBudget::default()).unwrap())
        });
    }
    group.finish();
}

fn moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("even_moment_k2_t2");
    group.sample_size(10);
    for (name, route) in [("dense", MomentRoute::Dense), ("sparse", MomentRoute::Sparse)] {
        group
            .bench_function(name, |b| b.iter(|| even_moment_with(route, 2, 2, 1024, MemoryBudget::default()).unwrap()));
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let counter = Counter::default();
    let eq = parse_equation("x1^2 = x2^2 + x3^2 + x4^2").unwrap();
    let grid = geometric(64, 2048, 2);
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("homogeneous_three_squares_to_2048", |b| {
        b.iter(|| counter.sweep(&eq, &grid, Backend::Table).unwrap())
    });
    group.finish();
}

fn parametric(c: &mut Criterion) {
    let mut group = c.benchmark_group("parametric");
    group.bench_function("sector_count_1e8", |b| b.iter(|| sector_count(100_000_000)));
    group.bench_function("cubic_unit_1e8", |b| b.iter(|| family_count_in_cube(&CubicUnit, 100_000_000).unwrap()));
    group.finish();
}

criterion_group!(benches, backends, tables, moments, sweeps, parametric);
criterion_main!(benches);
