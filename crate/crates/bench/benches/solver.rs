use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nalgebra::{dvector, DMatrix, DVector};

use omopg_core::{
    inner_step, parse_scenario_with_overrides, prox_grad_map, run_experiment, solve_offline,
    CompositeObjective, EngineConfig, ExperimentOptions, ProxTerm, SmoothTerm,
};

fn composite_2d() -> CompositeObjective {
    let a = DMatrix::from_row_slice(2, 2, &[1.5, 0.3, 0.3, 1.0]);
    CompositeObjective::new(
        SmoothTerm::quadratic(a, dvector![0.2, -0.4]).unwrap(),
        ProxTerm::l1(0.1),
    )
}

fn bench_prox_grad(c: &mut Criterion) {
    let obj = composite_2d();
    let x = dvector![3.0, -2.0];
    let step = obj.max_step();
    c.bench_function("prox_grad_map_2d_l1", |b| {
        b.iter(|| prox_grad_map(black_box(&obj), black_box(&x), step).unwrap())
    });
}

fn bench_inner_step(c: &mut Criterion) {
    let objs = vec![composite_2d(), composite_2d()];
    let config = EngineConfig::new(
        vec![0.3, 0.7],
        vec![objs[0].max_step(), objs[1].max_step()],
        10,
        1,
    )
    .unwrap();
    let x = dvector![3.0, -2.0];
    c.bench_function("inner_step_n2", |b| {
        b.iter(|| inner_step(black_box(&objs), black_box(&x), &config).unwrap())
    });
}

fn bench_solve_offline(c: &mut Criterion) {
    let obj = composite_2d();
    let x0 = DVector::zeros(2);
    c.bench_function("solve_offline_ista_1e-10", |b| {
        b.iter(|| solve_offline(black_box(&obj), &x0, 1e-10, 100_000).unwrap())
    });
}

fn bench_experiment(c: &mut Criterion) {
    let text = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/drift2.scn"),
    )
    .unwrap();
    let spec = parse_scenario_with_overrides(&text, &[("T".into(), "10".into())]).unwrap();
    c.bench_function("run_experiment_drift2_t10", |b| {
        b.iter(|| run_experiment(black_box(&spec), &ExperimentOptions::default()).unwrap())
    });
}

criterion_group!(
    benches,
    bench_prox_grad,
    bench_inner_step,
    bench_solve_offline,
    bench_experiment
);
criterion_main!(benches);
