//! Benchmarks for the encoding and alignment pipelines: the PCA+ridge
//! fit behind every alignment score, and the symmetric two-model variant.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use repgeom::alignment::{align_models, run_encoding, AlignmentConfig};
use repgeom::synthetic::{linear_teacher, TeacherNoise};
use repgeom_bench::gaussian;

fn bench_encoding(c: &mut Criterion) {
    let mut group = c.benchmark_group("encoding");
    group.sample_size(10).warm_up_time(Duration::from_secs(1));
    let x = gaussian(1000, 100, 50);
    let teacher = linear_teacher(&x, 50, TeacherNoise::ExplainableFraction(0.8), 51).unwrap();
    let cfg = AlignmentConfig { n_components: 100, seed: 1, ..AlignmentConfig::default() };
    group.bench_function("1000x100-to-50-targets", |b| {
        b.iter(|| run_encoding(black_box(&x), black_box(&teacher.targets), &cfg).unwrap())
    });
    group.finish();
}

fn bench_align_models(c: &mut Criterion) {
    let mut group = c.benchmark_group("align-models");
    group.sample_size(10).warm_up_time(Duration::from_secs(1));
    let a = gaussian(1000, 50, 52);
    let b_cloud = gaussian(1000, 50, 53);
    let cfg = AlignmentConfig { n_components: 40, seed: 2, ..AlignmentConfig::default() };
    group.bench_function("1000x50-pair", |b| {
        b.iter(|| align_models(black_box(&a), black_box(&b_cloud), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_encoding, bench_align_models);
criterion_main!(benches);
