use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use splitpack_core::{
    exact_opt, gen_a75_worst, gen_random, next_fit, normalize, pack_75, ExactOptions, SizeDistribution,
};

fn bench_next_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("next_fit");
    for n in [100, 1_000, 10_000] {
        let inst = gen_random(n, 3, SizeDistribution::mixed(), 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| next_fit(black_box(inst)))
        });
    }
    group.finish();
}

fn bench_pack_75(c: &mut Criterion) {
    let mut group = c.benchmark_group("pack_75");
    for n in [100, 1_000, 10_000] {
        let inst = gen_random(n, 2, SizeDistribution::mixed(), 2).unwrap();
        group.bench_with_input(BenchmarkId::new("random", n), &inst, |b, inst| {
            b.iter(|| pack_75(black_box(inst)).unwrap())
        });
    }
    let (inst, _) = gen_a75_worst(100).unwrap();
    group.bench_function("bad_example_100", |b| b.iter(|| pack_75(black_box(&inst)).unwrap()));
    group.finish();
}

fn bench_exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_opt");
    group.sample_size(10);
    for n in [4, 6, 7] {
        let inst = gen_random(n, 2, SizeDistribution::mixed(), 3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| exact_opt(black_box(inst), &ExactOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_normalize(c: &mut Criterion) {
    let inst = gen_random(200, 2, SizeDistribution::mixed(), 4).unwrap();
    let (packing, _) = next_fit(&inst);
    c.bench_function("normalize_nf_200", |b| {
        b.iter(|| normalize(black_box(&inst), black_box(&packing)).unwrap())
    });
}

criterion_group!(benches, bench_next_fit, bench_pack_75, bench_exact, bench_normalize);
criterion_main!(benches);
