use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use roict_bench::*;
use roict_core::fbp::FbpConfig;
use roict_core::solve::{solve_anneal, solve_greedy, AnnealSchedule};
use roict_core::*;

fn bench_forward_model(c: &mut Criterion) {
    let g = geometry();
    let m = matrix();
    let truth = phantom();
    c.bench_function("build_system_matrix 48x48 x 30 views", |b| {
        b.iter(|| build_system_matrix(black_box(&g), SIZE, SIZE).unwrap())
    });
    c.bench_function("forward_project 48x48", |b| {
        b.iter(|| forward_project(black_box(&truth), &m).unwrap())
    });
}

fn bench_coarse(c: &mut Criterion) {
    let g = geometry();
    let m = matrix();
    let truth = phantom();
    let sino = forward_project(&truth, &m).unwrap();
    c.bench_function("fbp 48x48 x 30 views", |b| {
        b.iter(|| fbp(black_box(&sino), &g, SIZE, SIZE, &FbpConfig::default()).unwrap())
    });
    c.bench_function("sart 20 iterations", |b| {
        b.iter(|| sart(black_box(&sino), &m, &sart_config()).unwrap())
    });
}

fn bench_refinement(c: &mut Criterion) {
    let m = matrix();
    let truth = phantom();
    let measured = forward_project(&truth, &m).unwrap();
    let coarse = sart(&measured, &m, &sart_config()).unwrap();
    let background = coarse.mask_roi(&roi()).unwrap();
    let residual = residual_sinogram(&measured, &background, &m).unwrap();
    c.bench_function("build_roi_qubo 288 variables", |b| {
        b.iter(|| {
            build_roi_qubo(
                black_box(&residual),
                &m,
                &roi(),
                &levels(),
                qubo::DEFAULT_PRUNE_TOL,
            )
            .unwrap()
        })
    });

    let problem = refinement_problem();
    c.bench_function("solve_greedy 288 variables", |b| {
        b.iter(|| solve_greedy(black_box(&problem), 1).unwrap())
    });
    let mut group = c.benchmark_group("anneal");
    group
        .sample_size(10)
        .measurement_time(Duration::from_secs(20));
    group.bench_function("solve_anneal 288 vars, 2 restarts x 500 sweeps", |b| {
        let schedule = AnnealSchedule::scaled_to(&problem, 2, 500, 9);
        b.iter(|| solve_anneal(black_box(&problem), &schedule).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_forward_model, bench_coarse, bench_refinement);
criterion_main!(benches);
