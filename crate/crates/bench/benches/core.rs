use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rprun_core::coin_model::{color_heads, color_heads_censored, enumerate_exact, generate_tosses};
use rprun_core::ramanujan::compute_ramanujan_table;
use rprun_core::run_stats::{first_occurrences, run_report};
use rprun_core::sieve::build_prime_table;
use rprun_core::{Label, RpParams};

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    for limit in [1_000_000u64, 10_000_000] {
        g.bench_with_input(BenchmarkId::new("build", limit), &limit, |b, &l| {
            b.iter(|| build_prime_table(l).unwrap())
        });
    }
    let table = build_prime_table(10_000_000).unwrap();
    g.bench_function("prime_count", |b| {
        let mut x = 1u64;
        b.iter(|| {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            black_box(table.prime_count(x % 10_000_000).unwrap())
        })
    });
    g.finish();
}

fn ramanujan(c: &mut Criterion) {
    let mut g = c.benchmark_group("ramanujan");
    g.sample_size(10);
    let table = build_prime_table(4_000_000).unwrap();
    g.bench_function("table_4e6", |b| {
        b.iter(|| compute_ramanujan_table(&table, &RpParams::ordinary()).unwrap())
    });
    g.finish();
}

fn coins(c: &mut Criterion) {
    let mut g = c.benchmark_group("coins");
    let tosses = generate_tosses(1 << 20, 2.0 / 3.0, 1).unwrap();
    g.bench_function("generate_1m", |b| {
        b.iter(|| generate_tosses(1 << 20, 2.0 / 3.0, 1).unwrap())
    });
    g.bench_function("color_1m", |b| b.iter(|| color_heads(&tosses)));
    g.bench_function("color_censored_1m", |b| {
        b.iter(|| color_heads_censored(&tosses, 3))
    });
    let stream = color_heads(&tosses).head_stream();
    g.bench_function("run_report_1m", |b| b.iter(|| run_report(&stream)));
    g.bench_function("first_occurrences_1m", |b| {
        b.iter(|| first_occurrences(&stream, Label::Red, 24))
    });
    g.sample_size(10);
    g.bench_function("enumerate_16", |b| {
        b.iter(|| enumerate_exact(16, 2.0 / 3.0).unwrap())
    });
    g.finish();
}

criterion_group!(benches, sieve, ramanujan, coins);
criterion_main!(benches);
