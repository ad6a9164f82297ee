//! Simulation runners.
//!
//! * [`propagate_exact`] pushes the exact distribution over
//!   `(vertex, history)` through a chain of update-map tables.
//! * [`sample`] draws trajectories from the same Markov chain.
//! * [`estimate_quasi`] samples from a signed initial decomposition and
//!   averages the signed event indicator.
//! * [`run_tableau_fast`] runs stabilizer circuits on the bit-packed tableau.
//!
//! Randomness: shot `i` uses `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `i`, so results do not depend on thread count or scheduling.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adaptive::{history_label, Action, AdaptiveComputation, NamedResource, Resource, StepPlan};
use crate::geometry::{
    derive_update_map, membership, simulation_error, Arithmetic, CoeffVector, Decomposition, Membership,
    UpdateMapTable, VertexSet,
};
use crate::pauli::{CliffordGate, PauliIndex};
use crate::tableau::{MeasureMode, StabilizerTableau};
use crate::{Error, Result};

/// Tolerance of the per-stage simulation-diagram check.
pub const DIAGRAM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Dense Born rule.
    Oracle,
    /// Gottesman-Knill fast path.
    Tableau,
    /// Update-map tables over vertex sets.
    Vertex,
}

/// Per-shot generator: the documented stream-split rule.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Vertex sets `A_0..A_N` (one per compiled stage, `A_0` holding the
/// prepared state) and the tables `q_1..q_N` between them.
#[derive(Clone, Debug)]
pub struct VertexModel {
    stages: Vec<VertexSet>,
    tables: Vec<UpdateMapTable>,
}

impl VertexModel {
    pub fn new(stages: Vec<VertexSet>, tables: Vec<UpdateMapTable>) -> Result<Self> {
        if stages.len() != tables.len() + 1 {
            return Err(Error::Dimension(format!(
                "{} stages need {} tables, got {}",
                stages.len(),
                stages.len() - 1,
                tables.len()
            )));
        }
        for (k, t) in tables.iter().enumerate() {
            if t.x_labels() != stages[k].labels() || t.y_labels() != stages[k + 1].labels() {
                return Err(Error::InvalidInput(format!("table {} does not connect its stage vertex sets", k + 1)));
            }
        }
        Ok(Self { stages, tables })
    }

    /// Derives every table by LP. `pick(n)` supplies the vertex set for a
    /// stage with `n` live qubits.
    pub fn derive(
        comp: &AdaptiveComputation,
        mut pick: impl FnMut(usize) -> Result<VertexSet>,
        arith: Arithmetic,
    ) -> Result<Self> {
        let stages = comp.instruments()?;
        let sets = stages.iter().map(|st| pick(st.qubits_out)).collect::<Result<Vec<_>>>()?;
        let tables = stages[1..]
            .iter()
            .enumerate()
            .map(|(k, st)| {
                derive_update_map(&st.instrument, &sets[k], &sets[k + 1], arith)
                    .map_err(|e| Error::Step { step: st.step.unwrap_or(0), msg: e.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sets, tables)
    }

    pub fn stages(&self) -> &[VertexSet] {
        &self.stages
    }

    pub fn tables(&self) -> &[UpdateMapTable] {
        &self.tables
    }

    /// Worst simulation-diagram error over all stages.
    pub fn diagram_error(&self, comp: &AdaptiveComputation) -> Result<f64> {
        let stages = comp.instruments()?;
        self.check_shape(comp)?;
        stages[1..]
            .iter()
            .zip(&self.tables)
            .enumerate()
            .map(|(k, (st, t))| simulation_error(t, &st.instrument, &self.stages[k], &self.stages[k + 1]))
            .try_fold(0.0f64, |acc, e| Ok(acc.max(e?)))
    }

    fn check_shape(&self, comp: &AdaptiveComputation) -> Result<Vec<StepPlan>> {
        let plans = comp.plans()?;
        if plans.len() != self.tables.len() {
            return Err(Error::InvalidInput(format!(
                "circuit has {} stages, model has {} tables",
                plans.len(),
                self.tables.len()
            )));
        }
        for (plan, t) in plans.iter().zip(&self.tables) {
            let outcomes = if plan.is_measurement() { 2 } else { 1 };
            if t.inputs().len() != 1 << plan.history_bits || t.outcomes().len() != outcomes {
                return Err(Error::Step { step: plan.step, msg: "table labels do not match the step".into() });
            }
        }
        Ok(plans)
    }

    /// Nonnegative weights of the initial state over `A_0`.
    pub fn initial_weights(&self, comp: &AdaptiveComputation) -> Result<Vec<f64>> {
        let rho = CoeffVector::from_operator(&comp.initial_state()?)?;
        match membership(&rho, &self.stages[0])? {
            Membership::Inside { weights } => Ok(weights),
            Membership::Outside { .. } => Err(Error::Infeasible(
                "initial state has no nonnegative decomposition over the first stage; use estimate_quasi".into(),
            )),
        }
    }
}

/// Exact output distribution over outcome histories.
pub fn propagate_exact(comp: &AdaptiveComputation, model: &VertexModel) -> Result<BTreeMap<String, f64>> {
    let plans = model.check_shape(comp)?;
    let mut dist: BTreeMap<(usize, usize), f64> = model
        .initial_weights(comp)?
        .into_iter()
        .enumerate()
        .filter(|(_, w)| *w > 0.0)
        .map(|(x, w)| ((x, 0), w))
        .collect();
    for (plan, table) in plans.iter().zip(&model.tables) {
        let mut next = BTreeMap::new();
        for ((x, hist), w) in dist {
            for m in table.moves(x, hist) {
                let h = if plan.is_measurement() { hist * 2 + m.s } else { hist };
                *next.entry((m.y, h)).or_insert(0.0) += w * m.p;
            }
        }
        dist = next;
    }
    let bits = comp.outcome_bits();
    let mut out = BTreeMap::new();
    for ((_, hist), w) in dist {
        *out.entry(history_label(hist, bits)).or_insert(0.0) += w;
    }
    Ok(out)
}

/// Draws an index proportional to the positive entries of `weights`.
fn pick_index(rng: &mut impl RngCore, weights: impl Iterator<Item = f64> + Clone) -> Option<usize> {
    let total: f64 = weights.clone().filter(|w| *w > 0.0).sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(i);
        if u < acc {
            return last;
        }
    }
    last
}

/// One trajectory through the tables from vertex `x`; returns the history.
fn walk(plans: &[StepPlan], model: &VertexModel, mut x: usize, rng: &mut impl RngCore) -> Result<usize> {
    let mut hist = 0usize;
    for (plan, table) in plans.iter().zip(&model.tables) {
        let moves = table.moves(x, hist);
        let i = pick_index(rng, moves.iter().map(|m| m.p))
            .ok_or_else(|| Error::Step { step: plan.step, msg: "reached a vertex with an empty table row".into() })?;
        x = moves[i].y;
        if plan.is_measurement() {
            hist = hist * 2 + moves[i].s;
        }
    }
    Ok(hist)
}

/// Seeded outcome counts from the vertex Markov chain.
pub fn sample(comp: &AdaptiveComputation, model: &VertexModel, shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    let plans = model.check_shape(comp)?;
    let weights = model.initial_weights(comp)?;
    let bits = comp.outcome_bits();
    let hists = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, shot);
            let x = pick_index(&mut rng, weights.iter().copied()).expect("weights sum to one");
            walk(&plans, model, x, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = BTreeMap::new();
    for h in hists {
        *counts.entry(history_label(h, bits)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Seeded counts drawn from an explicit distribution.
pub fn sample_distribution(dist: &BTreeMap<String, f64>, shots: u64, seed: u64) -> BTreeMap<String, u64> {
    let keys: Vec<&String> = dist.keys().collect();
    let picks: Vec<usize> = (0..shots)
        .into_par_iter()
        .map(|shot| pick_index(&mut shot_rng(seed, shot), dist.values().copied()).expect("nonempty distribution"))
        .collect();
    let mut counts = BTreeMap::new();
    for i in picks {
        *counts.entry(keys[i].clone()).or_insert(0) += 1;
    }
    counts
}

/// Predicate on full outcome histories: one of `0`, `1`, `*` per bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event(Vec<Option<bool>>);

impl Event {
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(Error::InvalidInput(format!("bad event character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Event)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Matches a history index with `bits` outcome bits.
    pub fn matches(&self, history: usize, bits: usize) -> bool {
        self.0.iter().enumerate().all(|(i, want)| want.is_none_or(|b| (history >> (bits - 1 - i) & 1 == 1) == b))
    }
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{}", b.map_or('*', |b| if b { '1' } else { '0' })))
    }
}

/// Hoeffding sample count `ceil((2 r^2 / eps^2) ln(2 / delta))` for sample
/// values in `[-r, r]`.
pub fn hoeffding_samples(negativity: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput("epsilon and delta must lie in (0, 1)".into()));
    }
    Ok((2.0 * negativity * negativity / (epsilon * epsilon) * (2.0 / delta).ln()).ceil() as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub event: String,
    pub estimate: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub samples: u64,
    pub negativity: f64,
    pub bound: &'static str,
}

/// Quasi-probability estimate of `P(event)`.
///
/// The initial vertex is drawn with probability `|r_alpha| / ||r||_1` and
/// carries weight `sign(r_alpha) ||r||_1`; later stages use the model's
/// (nonnegative) tables.
pub fn estimate_quasi(
    comp: &AdaptiveComputation,
    model: &VertexModel,
    decomposition: &Decomposition<f64>,
    event: &Event,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<EstimateReport> {
    let plans = model.check_shape(comp)?;
    let bits = comp.outcome_bits();
    if event.len() != bits {
        return Err(Error::InvalidInput(format!("event has {} bits, circuit records {bits}", event.len())));
    }
    let start = &model.stages[0];
    if decomposition.weights.len() != start.len() {
        return Err(Error::Dimension("decomposition does not match the first stage".into()));
    }
    let rho = CoeffVector::from_operator(&comp.initial_state()?)?;
    let mut rebuilt = vec![0.0; rho.coeffs().len()];
    for (w, v) in decomposition.weights.iter().zip(start.vectors()) {
        rebuilt.iter_mut().zip(v.coeffs()).for_each(|(acc, c)| *acc += w * c);
    }
    if rebuilt.iter().zip(rho.coeffs()).any(|(a, b)| (a - b).abs() > DIAGRAM_TOL) {
        return Err(Error::InvalidInput("decomposition does not reproduce the initial state".into()));
    }
    let negativity: f64 = decomposition.weights.iter().map(|w| w.abs()).sum();
    let samples = hoeffding_samples(negativity, epsilon, delta)?;
    let (pos, neg) = (0..samples)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, shot);
            let x = pick_index(&mut rng, decomposition.weights.iter().map(|w| w.abs())).expect("nonzero decomposition");
            let hist = walk(&plans, model, x, &mut rng)?;
            let hit = event.matches(hist, bits) as u64;
            Ok(if decomposition.weights[x] >= 0.0 { (hit, 0) } else { (0, hit) })
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let estimate = negativity * (pos as f64 - neg as f64) / samples as f64;
    Ok(EstimateReport {
        event: event.to_string(),
        estimate,
        epsilon,
        delta,
        samples,
        negativity,
        bound: "N = ceil(2 * negativity^2 / epsilon^2 * ln(2 / delta))",
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub gates: u64,
    pub measurements: u64,
    pub mean_gate_ns: f64,
    pub mean_measurement_ns: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableauRun {
    pub counts: BTreeMap<String, u64>,
    pub timing: Timing,
}

/// Starting tableau for stabilizer resources.
fn initial_tableau(comp: &AdaptiveComputation) -> Result<StabilizerTableau> {
    let mut t = StabilizerTableau::init_zero(comp.n)?;
    match comp.resource {
        Resource::Named(NamedResource::Zeros) => {}
        Resource::Named(NamedResource::PlusAll) => {
            for q in 0..comp.n {
                t.apply_gate(CliffordGate::H(q))?;
            }
        }
        _ => return Err(Error::Precondition("tableau backend needs a stabilizer resource (zeros or plus_all)".into())),
    }
    for &[i, j] in &comp.graph {
        t.apply_gate(CliffordGate::Cz(i, j))?;
    }
    Ok(t)
}

fn measured_pauli(action: &Action, n: usize) -> Option<(PauliIndex, bool)> {
    match action {
        Action::Gate(_) => None,
        Action::Measure(p) => Some((p.index().clone(), p.sign().expect("validated Hermitian"))),
        Action::LocalMeasure { qubit, single, .. } => {
            let mut idx = PauliIndex::identity(n);
            idx.set_x(*qubit, single.index().xbit(0));
            idx.set_z(*qubit, single.index().zbit(0));
            Some((idx, single.sign().expect("validated Hermitian")))
        }
    }
}

/// Runs a stabilizer circuit `shots` times on the tableau.
///
/// Destructive measurements leave the measured qubit in place; later steps
/// never touch it, so outcomes match the dense model.
pub fn run_tableau_fast(comp: &AdaptiveComputation, shots: u64, seed: u64) -> Result<TableauRun> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    let plans = comp.plans()?;
    let start = initial_tableau(comp)?;
    let clock = Instant::now();
    let runs = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, shot);
            let mut t = start.clone();
            let mut history = Vec::with_capacity(comp.outcome_bits());
            let (mut gate_ns, mut meas_ns) = (0u128, 0u128);
            for plan in &plans {
                let action = plan.action(&history);
                let tick = Instant::now();
                match measured_pauli(&action, comp.n) {
                    None => {
                        let Action::Gate(g) = action else { unreachable!("non-measurements are gates") };
                        t.apply_gate(g)?;
                        gate_ns += tick.elapsed().as_nanos();
                    }
                    Some((b, sign)) => {
                        let m = t.measure(&b, sign, MeasureMode::Random(&mut rng))?;
                        history.push(m.outcome);
                        meas_ns += tick.elapsed().as_nanos();
                    }
                }
            }
            let label: String = if history.is_empty() {
                "*".into()
            } else {
                history.iter().map(|&b| if b { '1' } else { '0' }).collect()
            };
            Ok((label, gate_ns, meas_ns))
        })
        .collect::<Result<Vec<_>>>()?;
    let total_seconds = clock.elapsed().as_secs_f64();
    let gates = plans.iter().filter(|p| !p.is_measurement()).count() as u64 * shots;
    let measurements = plans.iter().filter(|p| p.is_measurement()).count() as u64 * shots;
    let mut counts = BTreeMap::new();
    let (mut gate_ns, mut meas_ns) = (0u128, 0u128);
    for (label, g, m) in runs {
        *counts.entry(label).or_insert(0) += 1;
        gate_ns += g;
        meas_ns += m;
    }
    let mean = |ns: u128, k: u64| if k == 0 { 0.0 } else { ns as f64 / k as f64 };
    Ok(TableauRun {
        counts,
        timing: Timing {
            total_seconds,
            gates,
            measurements,
            mean_gate_ns: mean(gate_ns, gates),
            mean_measurement_ns: mean(meas_ns, measurements),
        },
    })
}

/// Random elementary Clifford circuit with interleaved random Pauli
/// measurements, for benchmarking.
pub fn random_clifford_circuit(n: usize, gates: usize, measurements: usize, seed: u64) -> Result<AdaptiveComputation> {
    use crate::adaptive::{Model, Step};
    if n < 2 {
        return Err(Error::InvalidInput("benchmark circuits need at least two qubits".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = gates + measurements;
    let mut is_measure = vec![false; total];
    let mut placed = 0;
    while placed < measurements {
        let i = rng.random_range(0..total);
        if !is_measure[i] {
            is_measure[i] = true;
            placed += 1;
        }
    }
    let steps = is_measure
        .into_iter()
        .map(|m| {
            if m {
                let mut p: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
                if p.chars().all(|c| c == 'I') {
                    p.replace_range(0..1, "Z");
                }
                Step::Measure { cases: BTreeMap::from([(String::new(), p)]) }
            } else {
                match rng.random_range(0..3) {
                    0 => Step::Gate { name: "H".into(), qubits: vec![rng.random_range(0..n)] },
                    1 => Step::Gate { name: "S".into(), qubits: vec![rng.random_range(0..n)] },
                    _ => {
                        let c = rng.random_range(0..n);
                        let mut t = rng.random_range(0..n - 1);
                        if t >= c {
                            t += 1;
                        }
                        Step::Gate { name: "CNOT".into(), qubits: vec![c, t] }
                    }
                }
            }
        })
        .collect();
    let comp = AdaptiveComputation { model: Model::Clifford, n, resource: Resource::default(), graph: vec![], steps };
    comp.validate()?;
    Ok(comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::evaluate_born;
    use crate::geometry::robustness;

    fn circuit(s: &str) -> AdaptiveComputation {
        AdaptiveComputation::from_json(s).unwrap()
    }

    fn stabilizer_model(comp: &AdaptiveComputation) -> VertexModel {
        VertexModel::derive(comp, VertexSet::stabilizer, Arithmetic::Exact).unwrap()
    }

    #[test]
    fn propagation_matches_oracle() {
        let comp = circuit(
            r#"{"model":"clifford","n":2,"steps":[{"type":"gate","name":"H","qubits":[0]},{"type":"measure","cases":{"":"XI"}},
                {"type":"gate","name":"CNOT","qubits":[0,1]},{"type":"measure","cases":{"0":"ZZ","1":"-YY"}},{"type":"measure","cases":{"":"IZ"}}]}"#,
        );
        let model = stabilizer_model(&comp);
        assert!(model.diagram_error(&comp).unwrap() < 1e-12);
        let exact = propagate_exact(&comp, &model).unwrap();
        let born = evaluate_born(&comp).unwrap().distribution;
        let keys: Vec<&String> = born.keys().chain(exact.keys()).collect();
        for k in keys {
            let (a, b) = (exact.get(k).copied().unwrap_or(0.0), born.get(k).copied().unwrap_or(0.0));
            assert!((a - b).abs() < 1e-9, "{k}: {a} vs {b}");
        }
    }

    #[test]
    fn deterministic_circuits_give_point_masses() {
        let comp = circuit(
            r#"{"model":"clifford","n":1,"steps":[{"type":"gate","name":"X","qubits":[0]},{"type":"measure","cases":{"":"Z"}}]}"#,
        );
        let model = stabilizer_model(&comp);
        assert_eq!(propagate_exact(&comp, &model).unwrap(), BTreeMap::from([("1".to_string(), 1.0)]));
        assert_eq!(sample(&comp, &model, 50, 3).unwrap(), BTreeMap::from([("1".to_string(), 50)]));
    }

    #[test]
    fn sampling_is_seeded_and_calibrated() {
        let comp = circuit(r#"{"model":"clifford","n":1,"steps":[{"type":"measure","cases":{"":"X"}}]}"#);
        let model = stabilizer_model(&comp);
        let a = sample(&comp, &model, 10_000, 42).unwrap();
        assert_eq!(a, sample(&comp, &model, 10_000, 42).unwrap());
        let freq = a["0"] as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.015, "{freq}");
    }

    #[test]
    fn sample_counts() {
        assert_eq!(hoeffding_samples(2f64.sqrt(), 0.05, 0.05).unwrap(), 5903);
        assert_eq!(hoeffding_samples(2f64.sqrt(), 0.01, 0.05).unwrap(), 147_556);
        assert!(hoeffding_samples(1.0, 0.0, 0.5).is_err());
        assert!(hoeffding_samples(1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn quasi_estimate_of_magic_state() {
        let comp = circuit(
            r#"{"model":"pauli","n":1,"resource":"magic_t_all","steps":[{"type":"measure","cases":{"":"X"}}]}"#,
        );
        let sp1 = VertexSet::stabilizer(1).unwrap();
        let model = VertexModel::derive(&comp, |_| Ok(sp1.clone()), Arithmetic::Exact).unwrap();
        assert!(matches!(propagate_exact(&comp, &model), Err(Error::Infeasible(_))));
        let rho = CoeffVector::from_operator(&comp.initial_state().unwrap()).unwrap();
        let dec = robustness(&rho, &sp1).unwrap();
        let report = estimate_quasi(&comp, &model, &dec, &Event::parse("0").unwrap(), 0.05, 0.05, 9).unwrap();
        assert_eq!(report.samples, 5903);
        let born = evaluate_born(&comp).unwrap().distribution["0"];
        assert!((report.estimate - born).abs() < 0.05, "{} vs {born}", report.estimate);
        assert!(report.estimate.abs() <= report.negativity);
    }

    #[test]
    fn plain_sampling_when_decomposition_is_convex() {
        let comp = circuit(r#"{"model":"clifford","n":1,"steps":[{"type":"measure","cases":{"":"X"}}]}"#);
        let model = stabilizer_model(&comp);
        let w = model.initial_weights(&comp).unwrap();
        let dec = Decomposition { weights: w, negativity: 1.0 };
        let report = estimate_quasi(&comp, &model, &dec, &Event::parse("0").unwrap(), 0.05, 0.05, 1).unwrap();
        let counts = sample(&comp, &model, report.samples, 1).unwrap();
        assert_eq!(report.estimate, counts["0"] as f64 / report.samples as f64);
    }

    #[test]
    fn tableau_bell_parity() {
        let comp = circuit(
            r#"{"model":"clifford","n":2,"steps":[{"type":"gate","name":"H","qubits":[0]},{"type":"gate","name":"CNOT","qubits":[0,1]},
                {"type":"measure","cases":{"":"ZI"}},{"type":"measure","cases":{"":"IZ"}}]}"#,
        );
        let run = run_tableau_fast(&comp, 1000, 7).unwrap();
        assert!(run.counts.keys().all(|k| k == "00" || k == "11"));
        assert_eq!(run.counts.values().sum::<u64>(), 1000);
        assert_eq!(run.counts, run_tableau_fast(&comp, 1000, 7).unwrap().counts);
        assert_eq!(run.timing.gates, 2000);
    }

    #[test]
    fn tableau_runs_the_cluster_model() {
        let comp = circuit(
            r#"{"model":"local_pauli","n":3,"resource":"plus_all","graph":[[0,1],[1,2]],"steps":[
                {"type":"local_measure","qubit":0,"cases":{"":"X"}},
                {"type":"feedforward","affine":[1],"const":0},
                {"type":"local_measure","qubit":1,"cases":{"0":"X","1":"-X"}},
                {"type":"local_measure","qubit":2,"cases":{"":"Z"}}]}"#,
        );
        let born = evaluate_born(&comp).unwrap().distribution;
        let run = run_tableau_fast(&comp, 20_000, 5).unwrap();
        let tv: f64 =
            born.iter().map(|(k, p)| (p - *run.counts.get(k).unwrap_or(&0) as f64 / 20_000.0).abs()).sum::<f64>() / 2.0;
        assert!(tv < 0.02, "{tv}");
        assert!(run.counts.keys().all(|k| born.contains_key(k)));
        let magic = circuit(r#"{"model":"pauli","n":1,"resource":"magic_t_all","steps":[]}"#);
        assert!(run_tableau_fast(&magic, 1, 0).is_err());
    }

    #[test]
    fn events() {
        let e = Event::parse("1*0").unwrap();
        assert!(e.matches(0b100, 3) && e.matches(0b110, 3));
        assert!(!e.matches(0b101, 3));
        assert_eq!(e.to_string(), "1*0");
        assert!(Event::parse("2").is_err());
    }

    #[test]
    fn benchmark_circuit_shape() {
        let comp = random_clifford_circuit(8, 50, 5, 1).unwrap();
        assert_eq!(comp.outcome_bits(), 5);
        let run = run_tableau_fast(&comp, 3, 1).unwrap();
        assert_eq!(run.timing.measurements, 15);
    }
}
