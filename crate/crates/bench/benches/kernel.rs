use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use transvect::catalog::{theta_weight, ThetaSign};
use transvect::invariance::{full_system, oracle_agreement, rank18_check};
use transvect::{classify, q, QuadExt};
use transvect_bench::workload_weights;

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel");
    for order in [3usize, 5, 6, 8] {
        let w = workload_weights()[0].clone();
        group.bench_with_input(BenchmarkId::new("full_system", order), &order, |b, &k| {
            b.iter(|| full_system(k, black_box(w.clone())).kernel())
        });
    }
    for (i, w) in workload_weights().iter().enumerate() {
        group.bench_with_input(BenchmarkId::new("classify_order4", i), w, |b, w| {
            b.iter(|| classify(4, black_box(w.clone())))
        });
    }
    let kappa: QuadExt = theta_weight(ThetaSign::Plus).unwrap();
    group.bench_function("classify_order5_quadratic", |b| {
        b.iter(|| classify(5, black_box([kappa.clone(), kappa.clone(), kappa.clone()])))
    });
    group.bench_function("rank18_order8", |b| {
        b.iter(|| rank18_check(8, black_box([q(1, 3), q(2, 5), q(-7, 2)])))
    });
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for order in [3usize, 5] {
        group.bench_with_input(BenchmarkId::new("agreement", order), &order, |b, &k| {
            b.iter(|| oracle_agreement(k, black_box([q(1, 1), q(2, 1), q(3, 1)])))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels, oracle);
criterion_main!(benches);
