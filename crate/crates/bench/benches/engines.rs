use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kcbs_core::lab::{run_experiment, Experiment, ExperimentConfig, NoiseModel, Source};
use kcbs_core::optimize::{maximize_violation, OptimizeConfig, Target};
use kcbs_core::photonic::{build_device, cascade, encode, pentagram_devices};
use kcbs_core::qutrit::make_pentagram;
use kcbs_core::sequential::{kcbs_run, Order};
use kcbs_core::{classical_kcbs_bound, classical_wright_bound};

fn exact(c: &mut Criterion) {
    let p = make_pentagram();
    c.bench_function("make_pentagram", |b| b.iter(make_pentagram));
    c.bench_function("classical_bounds", |b| {
        b.iter(|| (classical_wright_bound(), classical_kcbs_bound()))
    });
    c.bench_function("kcbs_run_forward", |b| {
        b.iter(|| kcbs_run(black_box(*p.test_state()), p.cycle(), Order::Forward))
    });
}

fn photonic(c: &mut Criterion) {
    let p = make_pentagram();
    c.bench_function("build_device", |b| {
        b.iter(|| build_device(black_box(117.0), 50.0))
    });
    let first = pentagram_devices(50.0).unwrap();
    let second = pentagram_devices(100.0).unwrap();
    let input = encode(p.test_state());
    c.bench_function("cascade_edge", |b| {
        b.iter(|| cascade(&first[0], &second[1], black_box(&input)))
    });
}

fn stochastic(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_experiment");
    for experiment in [Experiment::Wright, Experiment::Kcbs] {
        let mut cfg = ExperimentConfig::new(experiment, 1);
        cfg.noise = NoiseModel::new(0.85, 0.0125, 0.003).unwrap();
        group.bench_function(format!("{experiment:?}"), |b| {
            b.iter(|| run_experiment(&Source::pentagram(), black_box(&cfg)))
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize");
    group.sample_size(10);
    for target in [Target::Wright, Target::Kcbs] {
        let cfg = OptimizeConfig {
            restarts: 4,
            ..OptimizeConfig::new(target, 1)
        };
        group.bench_function(format!("{target:?}_4_restarts"), |b| {
            b.iter(|| maximize_violation(black_box(&cfg)))
        });
    }
    group.finish();
}

criterion_group!(benches, exact, photonic, stochastic, search);
criterion_main!(benches);
