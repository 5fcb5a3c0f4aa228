//! Cross-module integration: census feeding statistics and rendering,
//! and the logic pipeline feeding the same statistics.

use beaverlab_core::census::{collect_runtimes, run_census};
use beaverlab_core::prover::{filter_systems, proof_census, truth_space, DecisionBudget};
use beaverlab_core::stats::{fbb, monotone_tail, optime, DecisionDistribution};
use beaverlab_core::terms::{enumerate_formulas, generate_axiom_systems};
use beaverlab_core::viz::{curve_order_for, render_field, FieldValue, BACKGROUND, RED, WHITE};
use num_rational::Ratio;

#[test]
fn census_to_stats_to_field() {
    let census = run_census(2, 6, 4).unwrap();
    let d = DecisionDistribution::from_halting_census(&census);
    assert_eq!(fbb(&d).unwrap(), 6);
    assert_eq!(optime(&d, Ratio::new(1, 5)).unwrap(), 1);
    // The exhaustive (2,2) tail rises again at t = 6.
    assert!(!monotone_tail(&d));

    let runtimes = collect_runtimes(2, 6, 4).unwrap();
    let order = curve_order_for(runtimes.len() as u64);
    assert_eq!(order, 7);
    let values = runtimes
        .iter()
        .map(|r| r.map_or(FieldValue::Undecided, |t| FieldValue::Decided(t as u64)));
    let image = render_field(values, runtimes.len() as u64, 6, order).unwrap();
    // Red = champions, white = non-halting, background = unused cells;
    // greys partition the rest of the 128 x 128 grid.
    assert_eq!(image.count_color(RED), census.counts[&6]);
    assert_eq!(image.count_color(WHITE), census.nonhalting);
    assert_eq!(image.count_color(BACKGROUND), 16_384 - census.total);
    let histogram_mass: u64 = census.counts.values().sum();
    let grey_mass = image.pixels.len() as u64
        - image.count_color(RED)
        - image.count_color(WHITE)
        - image.count_color(BACKGROUND);
    assert_eq!(grey_mass, histogram_mass - census.counts[&6]);
}

#[test]
fn logic_pipeline_to_stats() {
    let budget = DecisionBudget { max_term_leaves: 8, ..DecisionBudget::default() };
    let corpus = enumerate_formulas(2);
    let systems = generate_axiom_systems(&corpus, None).unwrap();
    let kept = filter_systems(systems, &budget);
    // L = 2 corpus is {x1 = x1, x1 = x2}: the reflexive singleton is
    // dependent (reflexivity proves it from nothing) and the trivial
    // singleton is inconsistent, so nothing survives.
    assert!(kept.is_empty());

    // The L = 3 pipeline, exhaustively.
    let corpus = enumerate_formulas(3);
    let systems = generate_axiom_systems(&corpus, None).unwrap();
    let kept = filter_systems(systems, &budget);
    assert_eq!(kept.len(), 15);
    let space = truth_space(
        kept.into_iter().map(|a| a.system).collect(),
        corpus,
        &budget,
    );
    let census = proof_census(&space);
    assert_eq!(census.total, 150);
    assert_eq!(census.undecided, 0);
    // Frozen pipeline outcome: 40 subsumption proofs, 110 disproofs at
    // domain size 2 (decision time 3).
    assert_eq!(census.counts, [(1, 40), (3, 110)].into_iter().collect());
    assert_eq!(fbb(&census).unwrap(), 3);
}
