use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zoneshare::analytic::{coverage_curve, UserClass};
use zoneshare::optimizer::{sweep, Engine, SweepGrid};
use zoneshare::simulator::{estimate_adr_grid, estimate_coverage_curves, SimulationSettings, DEFAULT_SEED};
use zoneshare::{Execution, Scenario, ScenarioConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn scenario() -> Scenario {
    ScenarioConfig::default()
        .validate()
        .unwrap()
        .modified(|c| c.sim_region_half_width = 20e3)
        .unwrap()
}

fn thresholds() -> Vec<f64> {
    (0..16).map(|i| 10f64.powf((-10.0 + 2.0 * i as f64) / 10.0)).collect()
}

fn simulated_coverage(c: &mut Criterion) {
    let sc = scenario();
    let th = thresholds();
    let mut group = c.benchmark_group("simulated_coverage_2000_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        let settings = SimulationSettings { trials: 2000, seed: DEFAULT_SEED, exec };
        group.bench_with_input(BenchmarkId::from_parameter(name), &settings, |b, s| {
            b.iter(|| estimate_coverage_curves(black_box(&sc), &UserClass::ALL, &th, s).unwrap())
        });
    }
    group.finish();
}

fn simulated_adr_grid(c: &mut Criterion) {
    let sc = scenario();
    let rps: Vec<f64> = (0..=4).map(|k| k as f64 * 3e3).collect();
    let omegas: Vec<f64> = (0..=4).map(|k| k as f64 / 4.0).collect();
    let mut group = c.benchmark_group("simulated_adr_grid_5x5_1000_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        let settings = SimulationSettings { trials: 1000, seed: DEFAULT_SEED, exec };
        group.bench_with_input(BenchmarkId::from_parameter(name), &settings, |b, s| {
            b.iter(|| estimate_adr_grid(black_box(&sc), &rps, &omegas, s).unwrap())
        });
    }
    group.finish();
}

fn analytic_curve(c: &mut Criterion) {
    let sc = scenario();
    let th = thresholds();
    let mut group = c.benchmark_group("analytic_tn_curve_16_thresholds");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| coverage_curve(black_box(&sc), UserClass::Tn, &th, e).unwrap())
        });
    }
    group.finish();
}

fn analytic_sweep(c: &mut Criterion) {
    let sc = scenario();
    let grid = SweepGrid::new(vec![0.0, 6e3, 12e3], vec![0.25, 0.5, 0.75]).unwrap();
    let mut group = c.benchmark_group("analytic_sweep_3x3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| sweep(black_box(&sc), &grid, &Engine::Analytic, e).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, simulated_coverage, simulated_adr_grid, analytic_curve, analytic_sweep);
criterion_main!(benches);
