use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use transvect::conformal::solve_b2k;
use transvect::invariance::{grid_triples, sweep};
use transvect::q;
use transvect_bench::small_grid;

fn sweeps(c: &mut Criterion) {
    let triples = grid_triples(&small_grid());
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for order in [3usize, 6, 7] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &k| {
            b.iter(|| sweep(k, &triples).unwrap())
        });
    }
    group.finish();
}

fn conformal(c: &mut Criterion) {
    let mut group = c.benchmark_group("conformal");
    for k in [1u32, 2, 3] {
        group.bench_with_input(BenchmarkId::new("solve_b2k", k), &k, |b, &k| {
            b.iter(|| solve_b2k(k, 4, [q(1, 3), q(-2, 5), q(3, 7)]).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps, conformal);
criterion_main!(benches);
