use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use imab_core::{brute_force_opt, opt_curve, random_concave, run, Algorithm, RewardFunction};
use imab_core::oracle::DEFAULT_ENUMERATION_LIMIT;

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    for k in [2usize, 8, 32] {
        let inst = random_concave(k, 7, 200, (0.2, 1.0)).unwrap();
        for alg in [Algorithm::ImprovingAnytime, Algorithm::RoundRobin, Algorithm::Greedy] {
            group.bench_with_input(BenchmarkId::new(alg.to_string(), k), &inst, |b, inst| {
                b.iter(|| run(alg, black_box(inst), 10_000).unwrap())
            });
        }
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let inst = random_concave(8, 3, 500, (0.2, 1.0)).unwrap();
    c.bench_function("opt_curve k=8 T=10^4", |b| b.iter(|| opt_curve(black_box(&inst), 10_000)));

    let small = random_concave(3, 5, 20, (0.2, 1.0)).unwrap();
    c.bench_function("brute_force k=3 T=12", |b| {
        b.iter(|| brute_force_opt(black_box(&small), 12, DEFAULT_ENUMERATION_LIMIT).unwrap())
    });
}

fn prefix_sums(c: &mut Criterion) {
    c.bench_function("cumulative 10^6 cold", |b| {
        b.iter(|| {
            let f = RewardFunction::exponential_saturation(0.8, 300.0).unwrap();
            f.cumulative(black_box(1_000_000))
        })
    });
}

criterion_group!(benches, simulate, oracles, prefix_sums);
criterion_main!(benches);
