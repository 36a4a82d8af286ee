//! Enumeration throughput: sequential tree walk vs the rayon-backed
//! parallel walk at several length bounds, plus the naive oracle for
//! scale. Run with `cargo bench -p soph-lab`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use soph_lab::{enumerate_domain, naive_oracle, BitString, EnumConfig};

fn cfg(l_max: u32) -> EnumConfig {
    EnumConfig::new(l_max, 4096, 64, BitString::new())
}

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for l_max in [12u32, 14, 16] {
        group.bench_with_input(BenchmarkId::new("sequential", l_max), &l_max, |b, &l| {
            b.iter(|| enumerate_domain(&cfg(l), 1).unwrap().len())
        });
        let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
        group.bench_with_input(BenchmarkId::new("parallel", l_max), &l_max, |b, &l| {
            b.iter(|| enumerate_domain(&cfg(l), workers).unwrap().len())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("naive_oracle");
    group.sample_size(10);
    for l_max in [10u32, 12] {
        group.bench_with_input(BenchmarkId::new("exhaustive", l_max), &l_max, |b, &l| {
            b.iter(|| naive_oracle(&cfg(l)).len())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_enumeration, bench_oracle);
criterion_main!(benches);
