//! Sequential vs rayon-parallel execution of the grid-shaped workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::dmatrix;
use passmat::dissipop::{self, QuadraticSupplyRate};
use passmat::interconnect;
use passmat::lti::{self, Family};
use passmat::par::Exec;
use passmat::smib::{self, SmibParams, SweepWindow};
use passmat::{FrequencyGrid, StateSpace, SymmetricMatrix};

fn plant() -> StateSpace {
    StateSpace::new(
        dmatrix![-2.0, 3.0; -8.0, -10.0],
        dmatrix![-1.3, 3.4; 3.6, -1.7],
        dmatrix![8.0, 9.0; 10.0, 7.0],
        dmatrix![8.0, 8.0; 6.0, -8.0],
    )
    .unwrap()
}

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn frequency_sweep(c: &mut Criterion) {
    let sys = plant();
    let grid = FrequencyGrid::default();
    let mut g = c.benchmark_group("scalar_index_sweep");
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| lti::scalar_index_freq_with(&sys, &grid, Family::OutputFeedback, exec).unwrap())
        });
    }
    g.finish();
}

fn passivation(c: &mut Criterion) {
    let sys = plant();
    let grid = FrequencyGrid::default();
    let k = dmatrix![0.987, 0.643; 0.643, 1.013];
    let shortages = vec![("scalar".to_string(), SymmetricMatrix::scaled_identity(2, -0.1095))];
    let mut g = c.benchmark_group("passivation_sweep");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| interconnect::passivation_sweep(&sys, &k, &shortages, 1.0, 50, &grid, exec).unwrap())
        });
    }
    g.finish();
}

fn region(c: &mut Criterion) {
    let p = SmibParams::default();
    let window = SweepWindow { n11: 41, n22: 41, ..SweepWindow::default() };
    let mut g = c.benchmark_group("smib_region_sweep");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| smib::region_sweep(&p, &window, exec).unwrap()));
    }
    g.finish();
}

fn operator(c: &mut Criterion) {
    let sys = plant();
    let q = QuadraticSupplyRate::passivity(2);
    let mut g = c.benchmark_group("operator_assembly");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| dissipop::discretize_operator_with(&sys, &q, 20.0, 256, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, frequency_sweep, passivation, region, operator);
criterion_main!(benches);
