use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use invperm::permutation::{from_inv_sequence, inv_count_pairs, inv_count_tree};
use invperm::qcount::{exact_gap_prob, mahonian_row, prefix_count_row};
use invperm::{PermSampler, RngStream, SamplerKind};
use rand::seq::SliceRandom;
use rand::Rng;

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("counting");
    for n in [50usize, 200, 400] {
        let top = n * (n - 1) / 4;
        g.bench_with_input(BenchmarkId::new("mahonian_row", n), &n, |b, &n| b.iter(|| mahonian_row(n, top)));
        g.bench_with_input(BenchmarkId::new("prefix_count_row", n), &n, |b, &n| {
            b.iter(|| prefix_count_row(n, 5, top).unwrap())
        });
    }
    g.bench_function("exact_gap_prob 400/4000/20", |b| b.iter(|| exact_gap_prob(400, 4000, 20).unwrap()));
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sampling");
    for (n, m) in [(100usize, 1000u64), (825, 3399), (2000, 89443)] {
        for kind in [SamplerKind::Dp, SamplerKind::Tilted] {
            let sampler = PermSampler::new(kind, n, m).unwrap();
            let mut rng = RngStream::new(7, 0).rng();
            g.bench_function(format!("{kind} n={n} m={m}"), |b| b.iter(|| sampler.sample(&mut rng).unwrap()));
        }
    }
    g.finish();
}

fn decoding(c: &mut Criterion) {
    let mut g = c.benchmark_group("decoding");
    let mut rng = RngStream::new(3, 0).rng();
    for n in [1_000usize, 100_000] {
        let code: Vec<u32> = (0..n).map(|j| rng.random_range(0..=j as u32)).collect();
        g.bench_with_input(BenchmarkId::new("from_inv_sequence", n), &code, |b, code| {
            b.iter(|| from_inv_sequence(black_box(code)).unwrap())
        });
        let mut values: Vec<u32> = (1..=n as u32).collect();
        values.shuffle(&mut rng);
        g.bench_with_input(BenchmarkId::new("inv_count_tree", n), &values, |b, v| b.iter(|| inv_count_tree(black_box(v))));
        if n <= 1_000 {
            g.bench_with_input(BenchmarkId::new("inv_count_pairs", n), &values, |b, v| {
                b.iter(|| inv_count_pairs(black_box(v)))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, counting, sampling, decoding);
criterion_main!(benches);
