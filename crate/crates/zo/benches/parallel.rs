//! Compare the data-parallel Monte Carlo path against the sequential
//! fallback on the workloads that dominate runtime: smoothed-value sampling,
//! batched gradient estimation and raw sphere sampling.
//!
//! Build with the default features for the parallel numbers; rerun with
//! `--no-default-features` to measure the library when rayon is compiled out.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use zo::estimators::{batch_grad, EstimatorConfig, Scheme};
use zo::oracle::{NoiseKind, NoiseSpec, Oracle};
use zo::problems::{make_problem, ProblemKind, ProblemParams};
use zo::rng::{BaseRng, RngStream};
use zo::sampling::{sample_sphere_l1, sample_sphere_l2};
use zo::stats::{mc_summary, mc_summary_seq};

fn bench_mc_summary(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_summary");
    let problem = make_problem(ProblemKind::NonsmoothNorm, 16, &ProblemParams::default()).unwrap();
    let x: Vec<f64> = (0..16).map(|i| 0.1 * i as f64).collect();
    let sampler = move |rng: &mut BaseRng| {
        let e = zo::sampling::sample_ball(zo::sampling::Norm::L2, 16, rng).unwrap();
        let point: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a + 0.1 * b).collect();
        zo::oracle::Objective::mean(&problem, &point)
    };
    let stream = RngStream::new(1, 0);
    for n in [50_000usize, 200_000] {
        group.bench_with_input(BenchmarkId::new("dispatch", n), &n, |b, &n| {
            b.iter(|| mc_summary(&sampler, n, &stream).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| mc_summary_seq(&sampler, n, &stream).unwrap())
        });
    }
    group.finish();
}

fn bench_batch_grad(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_grad");
    let problem =
        make_problem(ProblemKind::SmoothQuadratic, 32, &ProblemParams::default()).unwrap();
    let noise = NoiseSpec::new(NoiseKind::Gaussian, 0.01).unwrap();
    let oracle = Oracle::new(&problem, noise);
    let x = vec![0.25; 32];
    let stream = RngStream::new(2, 0);
    for batch in [64usize, 1024] {
        let cfg = EstimatorConfig::new(Scheme::L2, 0.05, batch, 2.0).unwrap();
        group.bench_with_input(BenchmarkId::new("dispatch", batch), &cfg, |b, cfg| {
            b.iter(|| batch_grad(&oracle, &x, cfg, &stream).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", batch), &cfg, |b, cfg| {
            b.iter(|| {
                // sequential reference: same child-stream layout, plain loop
                let mut sum = vec![0.0; 32];
                for i in 0..cfg.batch {
                    let g = zo::estimators::grad_est(&oracle, &x, cfg, &stream.child(i as u64))
                        .unwrap();
                    for (s, gi) in sum.iter_mut().zip(&g) {
                        *s += gi;
                    }
                }
                for s in &mut sum {
                    *s /= cfg.batch as f64;
                }
                sum
            })
        });
    }
    group.finish();
}

fn bench_samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("samplers");
    for d in [8usize, 128] {
        group.bench_with_input(BenchmarkId::new("sphere_l1", d), &d, |b, &d| {
            let mut rng = RngStream::new(3, 0).rng();
            b.iter(|| sample_sphere_l1(d, &mut rng).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sphere_l2", d), &d, |b, &d| {
            let mut rng = RngStream::new(3, 1).rng();
            b.iter(|| sample_sphere_l2(d, &mut rng).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mc_summary, bench_batch_grad, bench_samplers);
criterion_main!(benches);
