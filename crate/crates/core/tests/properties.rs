//! Statistical and structural invariants across modules.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use polysim::adaptive::{evaluate_born, AdaptiveComputation, Model, NamedResource};
use polysim::engine::{estimate_quasi, propagate_exact, run_tableau_fast, Event, VertexModel};
use polysim::geometry::{robustness, Arithmetic, CoeffVector, VertexSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tv(p: &BTreeMap<String, f64>, counts: &BTreeMap<String, u64>, shots: f64) -> f64 {
    let keys: BTreeSet<&String> = p.keys().chain(counts.keys()).collect();
    keys.iter()
        .map(|k| (p.get(*k).copied().unwrap_or(0.0) - counts.get(*k).copied().unwrap_or(0) as f64 / shots).abs())
        .sum::<f64>()
        / 2.0
}

#[test]
fn tableau_counts_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let shots = 100_000u64;
    let bound = 4.5 * ((2.0f64 / 0.01).ln() / (2.0 * shots as f64)).sqrt();
    for n in 1..=4 {
        let comp = common::random_adaptive(&mut rng, Model::Clifford, n, NamedResource::Zeros, 4);
        let born = evaluate_born(&comp).unwrap().distribution;
        let counts = run_tableau_fast(&comp, shots, n as u64).unwrap().counts;
        let d = tv(&born, &counts, shots as f64);
        assert!(d < bound, "n={n}: TV {d} vs bound {bound}");
    }
}

#[test]
fn quasi_estimator_is_unbiased() {
    let comp = AdaptiveComputation::from_json(
        r#"{"model":"pauli","n":1,"resource":"magic_t_all","steps":[{"type":"measure","cases":{"":"Y"}},{"type":"measure","cases":{"0":"X","1":"Z"}}]}"#,
    )
    .unwrap();
    let sp1 = VertexSet::stabilizer(1).unwrap();
    let model = VertexModel::derive(&comp, |_| Ok(sp1.clone()), Arithmetic::Exact).unwrap();
    let dec = robustness(&CoeffVector::from_operator(&comp.initial_state().unwrap()).unwrap(), &sp1).unwrap();
    let event = Event::parse("0*").unwrap();
    let truth: f64 =
        evaluate_born(&comp).unwrap().distribution.iter().filter(|(k, _)| k.starts_with('0')).map(|(_, p)| p).sum();
    // Large epsilon keeps N small so the spread across runs is visible.
    let estimates: Vec<f64> =
        (0..200).map(|seed| estimate_quasi(&comp, &model, &dec, &event, 0.5, 0.5, seed).unwrap().estimate).collect();
    let mean = estimates.iter().sum::<f64>() / 200.0;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 199.0;
    let se = (var / 200.0).sqrt();
    assert!((mean - truth).abs() < 3.0 * se, "mean {mean} vs {truth} (se {se})");
}

#[test]
fn propagation_is_a_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sp1 = VertexSet::stabilizer(1).unwrap();
    for _ in 0..10 {
        let comp = common::random_adaptive(&mut rng, Model::Clifford, 1, NamedResource::Zeros, 5);
        let model = VertexModel::derive(&comp, |_| Ok(sp1.clone()), Arithmetic::Float).unwrap();
        let dist = propagate_exact(&comp, &model).unwrap();
        assert!(dist.values().all(|p| *p >= 0.0));
        assert!((dist.values().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn qubit_out_of_range_names_the_step() {
    let err = AdaptiveComputation::from_json(
        r#"{"model":"clifford","n":2,"steps":[{"type":"gate","name":"H","qubits":[0]},{"type":"gate","name":"CNOT","qubits":[0,2]}]}"#,
    )
    .unwrap_err();
    assert!(err.to_string().contains("step 1"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuits_round_trip_through_json(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comp = common::random_adaptive(&mut rng, Model::Clifford, n, NamedResource::Zeros, 4);
        let text = comp.to_json();
        let back = AdaptiveComputation::from_json(&text).unwrap();
        prop_assert_eq!(&back, &comp);
        prop_assert_eq!(back.to_json(), text);
    }
}
