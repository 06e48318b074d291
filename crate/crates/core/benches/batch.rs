use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use llcontrol::batch::{self, Execution};
use llcontrol::discretization::Discretization;
use llcontrol::dynamics::RhsKind;
use llcontrol::field::{Equilibrium, PhysicalParams};
use llcontrol::integrator::{run, ControlSchedule, IntegratorConfig, Phase, Termination};
use llcontrol::sampling;
use llcontrol::verify::{self, Level, Options};
use std::hint::black_box;

/// Random initial fields pushed through the field-controlled loop.
fn sweep(exec: Execution, runs: usize) -> f64 {
    let p = PhysicalParams::new(0.02, 1.0).unwrap();
    let d = Discretization::build(24, 1.0).unwrap();
    let cfg = IntegratorConfig {
        record_every: 100,
        ..IntegratorConfig::for_grid(&d, &p)
    };
    let finals = batch::map_range(exec, runs, |i| {
        let mut rng = sampling::rng(i as u64);
        let target = Equilibrium::new(sampling::unit(&mut rng)).unwrap();
        let m0 = sampling::band_limited_saturated(&mut rng, 24, 1.0, 4);
        let s = ControlSchedule::single(Phase::new(
            RhsKind::Field { gain: 10.0, target },
            Termination::Duration(0.5),
        ));
        run(&d, &p, &s, &m0, &cfg).unwrap().diagnostics.last().unwrap().lyap
    });
    finals.iter().sum()
}

fn bench_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("field_sweep_16");
    g.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| black_box(sweep(e, 16)))
        });
    }
    g.finish();
}

fn bench_verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_fast");
    g.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| {
                black_box(verify::run_all(&Options {
                    level: Level::Fast,
                    seed: 1,
                    execution: e,
                }))
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_sweep, bench_verify);
criterion_main!(benches);
