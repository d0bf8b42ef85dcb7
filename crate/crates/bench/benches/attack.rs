use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nodeinject::featuregen::generate_features;
use nodeinject::ga::{reference_labels, select_candidates, run_ga, FitnessContext, GaConfig};
use nodeinject::graph::{propagate, FeatureKind};
use nodeinject::models::{train_sgc, TrainConfig};
use nodeinject::LabelSource;
use nodeinject_bench::fixture;

fn propagation(c: &mut Criterion) {
    let (g, _) = fixture(2500, FeatureKind::Binary);
    let x = g.features().to_dense();
    c.bench_function("propagate 2500x700", |b| b.iter(|| propagate(&g, &x)));
}

fn attack_steps(c: &mut Criterion) {
    let (g, split) = fixture(2500, FeatureKind::Binary);
    let surrogate = train_sgc(&g, &split, &TrainConfig::sgc_default()).expect("surrogate trains");
    let labels = reference_labels(&surrogate, &g, LabelSource::Predicted);
    let row = generate_features(&g, &labels, 0, 18).expect("class present").row;
    let ctx = FitnessContext::new(&surrogate, &g, &split, &labels, &row, 0).expect("valid context");
    let pool: Vec<usize> = select_candidates(&ctx, 0.5).expect("candidates").iter().map(|c| c.node).collect();

    c.bench_function("candidate scoring", |b| b.iter(|| select_candidates(&ctx, 0.5)));

    c.bench_function("featuregen", |b| b.iter(|| generate_features(&g, &labels, 3, 18)));
    c.bench_function("fitness k=4", |b| {
        let mut i = 0;
        b.iter_batched(
            || {
                i += 1;
                (0..4).map(|j| pool[(i * 7 + j * 13) % pool.len()]).collect::<Vec<_>>()
            },
            |endpoints| ctx.evaluate(&endpoints),
            BatchSize::SmallInput,
        )
    });
    let cfg = GaConfig {
        population_size: 20,
        max_iterations: 30,
        ..GaConfig::default()
    };
    let mut group = c.benchmark_group("ga");
    group.sample_size(10);
    group.bench_function("pop 20, 30 generations, k=4", |b| b.iter(|| run_ga(&ctx, 4, &cfg)));
    group.finish();
}

criterion_group!(benches, propagation, attack_steps);
criterion_main!(benches);
