//! Benchmarks for the hot paths: point counting, sieving, murmuration
//! averages over the bundled corpus.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use murmur_core::dataset::{parse_corpus, select, ConductorInterval};
use murmur_core::ecpoint::{
    count_points_fast, count_points_naive, sieve_primes, ap_vector, CurveEquation, ResidueTable,
};
use murmur_core::murmur::murmuration;

fn bench_counting(c: &mut Criterion) {
    let curve = CurveEquation::from_coeffs([0, 0, 1, -1, 0]).unwrap();
    let mut group = c.benchmark_group("count_points");
    for &p in &[101u64, 1009, 10007] {
        let table = ResidueTable::new(p).unwrap();
        group.bench_with_input(BenchmarkId::new("fast", p), &p, |b, &p| {
            b.iter(|| count_points_fast(black_box(&curve), p, &table).unwrap())
        });
        if p <= 1009 {
            group.bench_with_input(BenchmarkId::new("naive", p), &p, |b, &p| {
                b.iter(|| count_points_naive(black_box(&curve), p))
            });
        }
    }
    group.finish();
}

fn bench_sieve(c: &mut Criterion) {
    c.bench_function("sieve_primes_700k", |b| {
        b.iter(|| sieve_primes(black_box(700_000)))
    });
}

fn bench_ap_vector(c: &mut Criterion) {
    let curve = CurveEquation::from_coeffs([0, 0, 1, -1, 0]).unwrap();
    c.bench_function("ap_vector_4096", |b| {
        b.iter(|| ap_vector(black_box(&curve), 4096))
    });
}

fn bench_murmuration(c: &mut Criterion) {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/corpus_le1000.csv");
    let Ok(text) = std::fs::read_to_string(path) else {
        return; // corpus not generated yet; skip quietly
    };
    let records = parse_corpus(std::io::Cursor::new(text)).unwrap();
    let window = ConductorInterval::new(200, 401).unwrap();
    let even = select(&records, 0, window);
    c.bench_function("murmuration_200_400_even", |b| {
        b.iter(|| murmuration(black_box(&even), 100).unwrap())
    });
}

criterion_group!(benches, bench_counting, bench_sieve, bench_ap_vector, bench_murmuration);
criterion_main!(benches);
