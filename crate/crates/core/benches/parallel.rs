//! Sequential versus rayon execution of the trial-level loops. Without the
//! `parallel` feature both variants run the sequential path.

use admira::experiment::{run_phase, Algorithm, PhaseOptions, SweepConfig};
use admira::operators::{estimate_delta_profile, GaussianOperator};
use admira::par::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn delta_profile(c: &mut Criterion) {
    let op = GaussianOperator::new(20, 20, 400, 1).unwrap();
    let mut group = c.benchmark_group("estimate_delta_profile");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| estimate_delta_profile(&op, 4, 64, 7, exec))
        });
    }
    group.finish();
}

fn phase_sweep(c: &mut Criterion) {
    let options = PhaseOptions {
        algorithms: vec![Algorithm::Admira],
    };
    let mut group = c.benchmark_group("phase_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        let config = SweepConfig {
            trials: 4,
            seed: 3,
            execution: exec,
            ..SweepConfig::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_phase(40, &[600, 1200], &[1, 2], &options, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, delta_profile, phase_sweep);
criterion_main!(benches);
