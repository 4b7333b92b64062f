//! Statistical-dimension estimation and weight-equation benchmarks.

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use wl1a::rng::substream;
use wl1a::{dist2_to_cone, estimate_statdim, solve_block_weight, ConeSpec};

fn bench_dist2(c: &mut Criterion) {
    let cone = ConeSpec::unweighted(60, 10).unwrap();
    let mut rng = substream(2, &[0xd1]);
    let g = DVector::from_fn(60, |_, _| rng.sample::<f64, _>(StandardNormal));
    c.bench_function("dist2_to_cone_p60_s10", |b| {
        b.iter(|| dist2_to_cone(std::hint::black_box(&g), &cone))
    });
}

fn bench_estimate(c: &mut Criterion) {
    let cone = ConeSpec::unweighted(60, 10).unwrap();
    let mut group = c.benchmark_group("estimate_statdim");
    group.sample_size(10);
    group.bench_function("p60_s10_10k_trials", |b| {
        b.iter(|| estimate_statdim(&cone, 10_000, 3).unwrap())
    });
    group.finish();
}

fn bench_weights(c: &mut Criterion) {
    c.bench_function("solve_block_weight_alpha_0_06", |b| {
        b.iter(|| solve_block_weight(std::hint::black_box(0.06), 1e-12).unwrap())
    });
}

criterion_group!(benches, bench_dist2, bench_estimate, bench_weights);
criterion_main!(benches);
