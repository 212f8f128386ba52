use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schur_primes::coloring::{random_coloring, residue_coloring, Domain};
use schur_primes::primes::sieve_primes;
use schur_primes::schur::{count_labels, count_labels_fft};
use schur_primes::search::scan_witnesses;

fn schur_counts(c: &mut Criterion) {
    let mut group = c.benchmark_group("schur_count");
    for n in [1_000u64, 4_096, 16_384] {
        let coloring = random_coloring(Domain::Interval(n), 3, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("brute_force", n), &coloring, |b, col| {
            b.iter(|| count_labels(black_box(col.labels()), n, 3))
        });
        group.bench_with_input(BenchmarkId::new("fft", n), &coloring, |b, col| {
            b.iter(|| count_labels_fft(black_box(col.labels()), n, 3).unwrap())
        });
    }
    group.finish();
}

fn witness_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("witness_search");
    group.sample_size(10);
    let classes = [(1, 1), (3, 2), (2, 1)].into_iter().collect();
    for n in [10_000u64, 100_000] {
        let pt = sieve_primes(n).unwrap();
        let coloring = residue_coloring(Domain::PrimesUpTo(n), 4, &classes).unwrap();
        group.bench_with_input(BenchmarkId::new("mod4", n), &coloring, |b, col| {
            b.iter(|| scan_witnesses(&pt, black_box(col), 20).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, schur_counts, witness_search);
criterion_main!(benches);
