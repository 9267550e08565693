use criterion::{black_box, criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

use asymorph::homogenize::{equivalence_pipeline, PipelineOptions};
use asymorph::metric::{entropy_profile, validate_ultrametric, validate_ultrametric_exhaustive};
use asymorph::{NetConvention, SizeCaps};
use asymorph_bench::{regular, word};

fn validate(c: &mut Criterion) {
    let mut g = c.benchmark_group("validate");
    for (a, l) in [(2, 8), (3, 6)] {
        // The verdict is cached per space, so every iteration needs a fresh one.
        g.bench_function(BenchmarkId::new("spanning-tree", format!("{a}^{l}")), |b| {
            b.iter_batched(|| word(a, l), |w| validate_ultrametric(black_box(&w)), BatchSize::LargeInput)
        });
    }
    let w = word(2, 6);
    g.bench_function("exhaustive/2^6", |b| b.iter(|| validate_ultrametric_exhaustive(black_box(&w))));
    g.finish();
}

fn entropy(c: &mut Criterion) {
    let caps = SizeCaps::default();
    let w = word(2, 9);
    let grid = w.scale().to_vec();
    c.bench_function("entropy/2^9 full grid", |b| {
        b.iter(|| entropy_profile(black_box(&w), &grid, &grid, NetConvention::Closed, &caps))
    });
}

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    for h in [6, 7] {
        let t = regular(3, h);
        g.bench_with_input(BenchmarkId::new("regular3", h), &t, |b, t| {
            b.iter(|| equivalence_pipeline(black_box(t), None, &PipelineOptions::default()))
        });
    }
    g.finish();
}

criterion_group!(benches, validate, entropy, pipeline);
criterion_main!(benches);
