use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use memevo::evolution::{evaluate, initialize, step};
use memevo::variation::random_network;
use memevo::{analogy_fitness, EvolutionConfig, ScoreWeights, VariationParams};
use memevo_bench::{analog_network, base_network, knowledge_base};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fitness(c: &mut Criterion) {
    let base = base_network();
    let analog = analog_network();
    let weights = ScoreWeights::default();
    c.bench_function("analogy_fitness/astronomy_vs_atom", |b| {
        b.iter(|| analogy_fitness(black_box(&base), black_box(&analog), &weights))
    });
    c.bench_function("analogy_fitness/self", |b| {
        b.iter(|| analogy_fitness(black_box(&base), black_box(&base), &weights))
    });
}

fn generation(c: &mut Criterion) {
    let kb = knowledge_base();
    let base = base_network();
    let params = VariationParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    c.bench_function("random_network/c_max_5", |b| {
        b.iter(|| random_network(&kb, &params, &mut rng))
    });

    let config = EvolutionConfig {
        pop_size: 50,
        ..EvolutionConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut seed_pop = initialize(&kb, &config, &mut rng);
    evaluate(&mut seed_pop, &base, &config);
    c.bench_function("step/pop_50", |b| {
        b.iter_batched(
            || (seed_pop.clone(), ChaCha8Rng::seed_from_u64(2)),
            |(pop, mut rng)| step(pop, &base, &kb, &config, &mut rng),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, fitness, generation);
criterion_main!(benches);
