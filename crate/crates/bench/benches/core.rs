use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use esforge_core::density::count_b_segmented;
use esforge_core::{
    construct_divisor_b, construct_mod4, density_experiment, eval_f, integer_sqrt_checked,
    parametric_search, verify_range, HarnessConfig, Parametrization, SearchBudget,
};

fn bench_f(c: &mut Criterion) {
    let p = Parametrization::new(4, 6721, 1683, 186_966).unwrap();
    c.bench_function("eval_f/6721", |b| b.iter(|| eval_f(black_box(&p))));
    c.bench_function("isqrt/u128", |b| {
        b.iter(|| integer_sqrt_checked(black_box(0x1234_5678_9abc_def0_1234_5678_9abc_def0)))
    });
}

fn bench_constructions(c: &mut Criterion) {
    c.bench_function("construct_mod4/999999", |b| {
        b.iter(|| construct_mod4(black_box(999_999)))
    });
    c.bench_function("construct_divisor_b/6721", |b| {
        b.iter(|| construct_divisor_b(black_box(6721), black_box(11)))
    });
}

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("parametric_search");
    // primes ≡ 1 (mod 4): no closed form applies
    for n in [97u64, 9973, 99_989] {
        let budget = SearchBudget::default_for(4, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| parametric_search(4, black_box(n), &budget))
        });
    }
    group.finish();
}

fn bench_density(c: &mut Criterion) {
    let mut group = c.benchmark_group("density");
    group.sample_size(10);
    group.bench_function("table/1e6", |b| {
        b.iter(|| density_experiment(black_box(&[1_000_000])))
    });
    group.bench_function("segmented/1e6", |b| {
        b.iter(|| count_b_segmented(black_box(&[1_000_000])))
    });
    group.finish();
}

fn bench_harness(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_range");
    group.sample_size(10);
    for threads in [1usize, 4] {
        let config = HarnessConfig {
            threads,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("2..20000", threads), &config, |b, cfg| {
            b.iter(|| verify_range(4, 2, 20_000, cfg))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_f,
    bench_constructions,
    bench_search,
    bench_density,
    bench_harness
);
criterion_main!(benches);
