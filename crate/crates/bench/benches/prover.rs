use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use beaverlab_core::prover::{decide, DecisionBudget};
use beaverlab_core::terms::{enumerate_formulas, AxiomSystem};

fn bench_decide(c: &mut Criterion) {
    let corpus = enumerate_formulas(3);
    let system = AxiomSystem::from_mask(&corpus, 0b10_0001);
    let budget = DecisionBudget { max_term_leaves: 8, ..DecisionBudget::default() };
    c.bench_function("decide_l3_goals", |b| {
        b.iter(|| {
            for goal in &corpus {
                black_box(decide(&system, goal, &budget));
            }
        })
    });
}

criterion_group!(benches, bench_decide);
criterion_main!(benches);
