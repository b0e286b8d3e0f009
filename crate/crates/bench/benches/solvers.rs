use std::hint::black_box;

use cnk::numerics::{min_norm_least_squares, DenseMatrix, SeededRng};
use cnk::selection::{build_distance_set, build_residual_set, compute_delta, compute_epsilon, RowGeometry};
use cnk::{solve, solve_glm_hybrid, MethodKind, Problem, SolverConfig, ThresholdMode};
use cnk_bench::{brown, glm, linear};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn brown_solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("brown50");
    group.sample_size(20);
    let (p, x0) = brown(50);
    for method in [MethodKind::Nrk, MethodKind::RdCnk, MethodKind::RbCnk] {
        let cfg = SolverConfig::new(method).with_seed(7).with_timing(false);
        group.bench_function(BenchmarkId::from_parameter(method), |b| {
            b.iter(|| solve(black_box(&p), &x0, &cfg).unwrap())
        });
    }
    group.finish();
}

fn glm_solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("glm200x10");
    group.sample_size(10);
    let (g, x0) = glm(200, 10, 1);
    for method in [MethodKind::DrCnk, MethodKind::DbCnk, MethodKind::RbCnk] {
        let cfg = SolverConfig::new(method).with_seed(1).with_timing(false);
        group.bench_function(BenchmarkId::from_parameter(method), |b| {
            b.iter(|| solve(black_box(&g), &x0, &cfg).unwrap())
        });
    }
    let cfg = SolverConfig::new(MethodKind::GlmHybridRb).with_timing(false);
    group.bench_function(BenchmarkId::from_parameter(MethodKind::GlmHybridRb), |b| {
        b.iter(|| solve_glm_hybrid(black_box(&g), &x0, &cfg).unwrap())
    });
    group.finish();
}

fn selection(c: &mut Criterion) {
    let (p, _) = linear(1000, 100, 3);
    let x = vec![0.1; 100];
    let geom = RowGeometry::new(p.residual(&x), p.grad_sq_norms(&x));
    let mode = ThresholdMode::default();
    c.bench_function("distance_set_m1000", |b| {
        b.iter(|| build_distance_set(black_box(&geom), compute_epsilon(&geom, mode).unwrap()).unwrap())
    });
    c.bench_function("residual_set_m1000", |b| {
        b.iter(|| build_residual_set(black_box(&geom), compute_delta(&geom, mode).unwrap()).unwrap())
    });
}

fn block_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("min_norm_least_squares");
    let mut rng = SeededRng::new(5);
    for (rows, cols) in [(10, 50), (50, 50), (100, 200)] {
        let j = DenseMatrix::from_row_major(rows, cols, (0..rows * cols).map(|_| rng.draw_normal()).collect())
            .unwrap();
        let rhs: Vec<f64> = (0..rows).map(|_| rng.draw_normal()).collect();
        group.bench_function(BenchmarkId::from_parameter(format!("{rows}x{cols}")), |b| {
            b.iter(|| min_norm_least_squares(black_box(&j), &rhs).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, brown_solves, glm_solves, selection, block_kernel);
criterion_main!(benches);
