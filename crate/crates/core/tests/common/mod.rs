//! Shared generators for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use polysim::adaptive::{history_label, AdaptiveComputation, Model, NamedResource, Resource, Step};
use rand::Rng;

pub fn random_pauli(rng: &mut impl Rng, n: usize) -> String {
    loop {
        let body: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        if body.chars().any(|c| c != 'I') {
            let sign = if rng.random_bool(0.5) { "-" } else { "+" };
            return format!("{sign}{body}");
        }
    }
}

pub fn random_gate(rng: &mut impl Rng, n: usize) -> (String, Vec<usize>) {
    let names = ["H", "S", "X", "Y", "Z", "CNOT", "CZ"];
    let k = if n == 1 { rng.random_range(0..5) } else { rng.random_range(0..7) };
    if k < 5 {
        (names[k].into(), vec![rng.random_range(0..n)])
    } else {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        (names[k].into(), vec![a, b])
    }
}

/// Adaptive circuit: measurement bases depend on the full history so far.
/// The Clifford model interleaves gates; the Pauli model measures only.
pub fn random_adaptive(
    rng: &mut impl Rng,
    model: Model,
    n: usize,
    resource: NamedResource,
    max_meas: usize,
) -> AdaptiveComputation {
    let meas = rng.random_range(1..=max_meas);
    let mut steps = Vec::new();
    let mut h = 0;
    while h < meas {
        if model == Model::Clifford && rng.random_bool(0.5) {
            let (name, qubits) = random_gate(rng, n);
            steps.push(Step::Gate { name, qubits });
            continue;
        }
        let cases: BTreeMap<String, String> = if rng.random_bool(0.3) {
            BTreeMap::from([(String::new(), random_pauli(rng, n))])
        } else {
            (0..1usize << h)
                .map(|i| (if h == 0 { String::new() } else { history_label(i, h) }, random_pauli(rng, n)))
                .collect()
        };
        steps.push(Step::Measure { cases });
        h += 1;
    }
    let comp = AdaptiveComputation { model, n, resource: Resource::Named(resource), graph: vec![], steps };
    comp.validate().expect("generated circuits are valid");
    comp
}
