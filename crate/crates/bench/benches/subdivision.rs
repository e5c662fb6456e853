use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use iis_bench::renaming_tower;
use iis_core::optimizer::DescendantIndex;
use iis_core::oracle::chromatic_by_partitions;
use iis_core::{chromatic_subdivision, Complex, Tower};
use std::hint::black_box;

fn towers(c: &mut Criterion) {
    let mut g = c.benchmark_group("tower");
    for (n, k) in [(1, 1), (1, 3), (2, 1), (2, 2), (3, 1)] {
        let input = Complex::standard(n);
        g.bench_with_input(BenchmarkId::from_parameter(format!("n{n}-k{k}")), &input, |b, input| {
            b.iter(|| Tower::build(black_box(input), k).unwrap())
        });
    }
    g.finish();
}

fn ch_versus_oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("ch-delta3");
    let input = Complex::standard(3);
    g.bench_function("schlegel", |b| {
        b.iter(|| chromatic_subdivision(black_box(&input)).unwrap())
    });
    g.bench_function("partitions", |b| {
        b.iter(|| chromatic_by_partitions(black_box(&input)).unwrap())
    });
    g.finish();
}

fn descendants(c: &mut Criterion) {
    let tower = renaming_tower();
    c.bench_function("descendant-index-n2-k2", |b| {
        b.iter(|| DescendantIndex::build(black_box(&tower)).unwrap())
    });
}

criterion_group!(benches, towers, ch_versus_oracle, descendants);
criterion_main!(benches);
