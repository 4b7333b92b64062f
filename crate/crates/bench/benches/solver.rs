//! Solver benchmarks at the experiment scale (p = 60, n = 55).

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use wl1a::rng::substream;
use wl1a::signal::gen_analysis_sparse_signal_with_rng;
use wl1a::{
    solve, AnalysisOperator, MeasurementSet, RecoveryProblem, SolverConfig, WeightVector,
};

struct Instance {
    op: AnalysisOperator,
    meas: MeasurementSet,
    weights: WeightVector,
}

fn instance(kappa: f64, m: usize) -> Instance {
    let (p, n, s) = (60, 55, 10);
    let mut rng = substream(1, &[0xbe]);
    let op = AnalysisOperator::random_with_condition(p, n, kappa, &mut rng).unwrap();
    let sig = gen_analysis_sparse_signal_with_rng(&op, s, &mut rng).unwrap();
    let a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = &a * sig.x();
    Instance {
        op,
        meas: MeasurementSet::new(a, y, 0.0).unwrap(),
        weights: WeightVector::uniform(p, 1.0).unwrap(),
    }
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for (label, kappa, m) in [("kappa_1_1_m40", 1.1, 40), ("kappa_230_m40", 230.0, 40)] {
        let inst = instance(kappa, m);
        group.bench_function(label, |b| {
            b.iter_batched(
                || SolverConfig::default(),
                |cfg| {
                    let prob =
                        RecoveryProblem::new(&inst.meas, &inst.op, &inst.weights).unwrap();
                    solve(&prob, &cfg).unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solve);
criterion_main!(benches);
