//! Adaptive instruments and the circuit IR.
//!
//! An adaptive computation is a chain `Phi_0, ..., Phi_N` of instruments
//! where step `k` takes the full outcome history of the earlier steps as its
//! classical input. Histories are bit strings in step order, the first
//! outcome leftmost; the empty history is labeled `*`.
//!
//! Circuits are stored symbolically ([`AdaptiveComputation`]) so the
//! tableau backend can run them at large `n`; [`AdaptiveComputation::instruments`]
//! compiles them to dense instruments for the oracle and vertex backends.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::oracle::{
    check_dense_size, join_labels, pauli_measurement_instrument, tensor_all, DenseInstrument, DenseOperator,
};
use crate::pauli::{magic_t_state, CliffordGate, PauliIndex, PhasedPauli};
use crate::{Error, Result};

/// Probability below which a branch counts as impossible.
const ZERO_BRANCH: f64 = 1e-14;

/// Longest outcome history the dense compiler enumerates.
const MAX_DENSE_HISTORY: usize = 16;

fn check_chain(phi: &DenseInstrument, psi: &DenseInstrument) -> Result<()> {
    if psi.in_dim() != phi.out_dim() {
        return Err(Error::Dimension(format!("cannot feed dimension {} into {}", phi.out_dim(), psi.in_dim())));
    }
    Ok(())
}

fn kraus_products(outer: &[DenseOperator], inner: &[DenseOperator]) -> Result<Vec<DenseOperator>> {
    let mut out = Vec::with_capacity(outer.len() * inner.len());
    for l in outer {
        for k in inner {
            out.push(l.matmul(k)?);
        }
    }
    Ok(out)
}

/// Adaptive composition `(Psi * Phi)_a^{s,r} = Psi_s^r . Phi_a^s`.
///
/// `Psi`'s inputs must be `Phi`'s outcomes; the pair `(s, r)` has index
/// `s * |Theta| + r`.
pub fn star_compose(phi: &DenseInstrument, psi: &DenseInstrument) -> Result<DenseInstrument> {
    check_chain(phi, psi)?;
    if psi.inputs() != phi.outcomes() {
        return Err(Error::InvalidInput("second instrument's inputs must be the first one's outcomes".into()));
    }
    let outcomes: Vec<String> =
        phi.outcomes().iter().flat_map(|s| psi.outcomes().iter().map(move |r| join_labels(s, r))).collect();
    let mut kraus = Vec::with_capacity(phi.inputs().len());
    for a in 0..phi.inputs().len() {
        let mut row = Vec::with_capacity(outcomes.len());
        for s in 0..phi.outcomes().len() {
            for r in 0..psi.outcomes().len() {
                row.push(kraus_products(psi.kraus(s, r), phi.kraus(a, s))?);
            }
        }
        kraus.push(row);
    }
    DenseInstrument::new(phi.inputs().to_vec(), outcomes, phi.in_dim(), psi.out_dim(), kraus)
}

/// Horizontal composition: `(Psi . Phi)_{a1,a2}^{s1,s2} = Psi_{a2}^{s2} . Phi_{a1}^{s1}`
/// with independent classical sets.
pub fn horizontal_compose(phi: &DenseInstrument, psi: &DenseInstrument) -> Result<DenseInstrument> {
    check_chain(phi, psi)?;
    let pair = |x: &[String], y: &[String]| -> Vec<String> {
        x.iter().flat_map(|a| y.iter().map(move |b| join_labels(a, b))).collect()
    };
    let mut kraus = Vec::new();
    for a1 in 0..phi.inputs().len() {
        for a2 in 0..psi.inputs().len() {
            let mut row = Vec::new();
            for s1 in 0..phi.outcomes().len() {
                for s2 in 0..psi.outcomes().len() {
                    row.push(kraus_products(psi.kraus(a2, s2), phi.kraus(a1, s1))?);
                }
            }
            kraus.push(row);
        }
    }
    DenseInstrument::new(
        pair(phi.inputs(), psi.inputs()),
        pair(phi.outcomes(), psi.outcomes()),
        phi.in_dim(),
        psi.out_dim(),
        kraus,
    )
}

/// Vertical composition `(Psi * Phi)_a^s = sum_b Phi_a^b (x) Psi_b^s`: the
/// outcome of `Phi` drives `Psi`, and the Hilbert spaces are tensored with
/// `Phi`'s factor first.
pub fn vertical_compose(phi: &DenseInstrument, psi: &DenseInstrument) -> Result<DenseInstrument> {
    if psi.inputs() != phi.outcomes() {
        return Err(Error::InvalidInput("lower instrument's inputs must be the upper one's outcomes".into()));
    }
    let mut kraus = Vec::with_capacity(phi.inputs().len());
    for a in 0..phi.inputs().len() {
        let mut row = Vec::with_capacity(psi.outcomes().len());
        for s in 0..psi.outcomes().len() {
            let mut list = Vec::new();
            for b in 0..phi.outcomes().len() {
                for k in phi.kraus(a, b) {
                    for l in psi.kraus(b, s) {
                        list.push(k.kron(l));
                    }
                }
            }
            row.push(list);
        }
        kraus.push(row);
    }
    DenseInstrument::new(
        phi.inputs().to_vec(),
        psi.outcomes().to_vec(),
        phi.in_dim() * psi.in_dim(),
        phi.out_dim() * psi.out_dim(),
        kraus,
    )
}

/// Classical feedforward `(Phi_L)_a^s(alpha) = delta_{s, f(a)} alpha` on the
/// scalars, for `f(a) = affine . a + constant` over `Z_2`.
pub fn feedforward_instrument(affine: &[bool], constant: bool) -> Result<DenseInstrument> {
    let h = affine.len();
    let inputs = (0..1usize << h).map(|i| history_label(i, h)).collect();
    let one = DenseOperator::identity(1);
    let kraus = (0..1usize << h)
        .map(|a| {
            let f = affine_value(affine, constant, a, h);
            [false, true].iter().map(|&s| if s == f { vec![one.clone()] } else { Vec::new() }).collect()
        })
        .collect();
    DenseInstrument::new(inputs, vec!["0".into(), "1".into()], 1, 1, kraus)
}

fn affine_value(affine: &[bool], constant: bool, history: usize, h: usize) -> bool {
    affine.iter().enumerate().fold(constant, |acc, (i, &c)| acc ^ (c && history >> (h - 1 - i) & 1 == 1))
}

/// `*` for the empty history, otherwise `h` bits with the first outcome
/// leftmost.
pub fn history_label(index: usize, h: usize) -> String {
    if h == 0 {
        "*".into()
    } else {
        (0..h).map(|i| if index >> (h - 1 - i) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Clifford gates and non-destructive Pauli measurements.
    Clifford,
    /// Non-destructive Pauli measurements only.
    Pauli,
    /// Graph-state entangler followed by destructive single-qubit
    /// measurements with affine feedforward.
    LocalPauli,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedResource {
    Zeros,
    MagicTAll,
    PlusAll,
}

/// Initial state of every qubit, or an explicit dense state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resource {
    Named(NamedResource),
    Explicit { state: DenseOperator },
}

impl Default for Resource {
    fn default() -> Self {
        Resource::Named(NamedResource::Zeros)
    }
}

impl Resource {
    pub fn state(&self, n: usize) -> Result<DenseOperator> {
        check_dense_size(n, "resource state")?;
        let single = |d: DenseOperator| tensor_all(&vec![d; n]);
        Ok(match self {
            Resource::Named(NamedResource::Zeros) => single(crate::oracle::basis_state(&[false])),
            Resource::Named(NamedResource::MagicTAll) => single(magic_t_state()),
            Resource::Named(NamedResource::PlusAll) => single(DenseOperator::from_fn(2, 2, |_, _| 0.5.into())),
            Resource::Explicit { state } => {
                if state.qubits() != Some(n) {
                    return Err(Error::Dimension(format!("explicit resource is not an {n}-qubit state")));
                }
                state.clone()
            }
        })
    }
}

/// One symbolic step. `cases` maps history bit strings (or `""`, a default
/// for every history) to signed Pauli strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    Gate {
        name: String,
        qubits: Vec<usize>,
    },
    Measure {
        cases: BTreeMap<String, String>,
    },
    LocalMeasure {
        qubit: usize,
        cases: BTreeMap<String, String>,
    },
    /// Must be followed by a `local_measure` whose cases are keyed by the
    /// feedforward value `"0"` / `"1"`.
    Feedforward {
        affine: Vec<u8>,
        #[serde(rename = "const")]
        constant: u8,
    },
}

/// A validated adaptive circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveComputation {
    pub model: Model,
    pub n: usize,
    #[serde(default)]
    pub resource: Resource,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub graph: Vec<[usize; 2]>,
    pub steps: Vec<Step>,
}

/// A step resolved against a concrete history.
#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Gate(CliffordGate),
    /// Non-destructive measurement of a signed Pauli on all qubits.
    Measure(PhasedPauli),
    /// Destructive measurement of a signed single-qubit Pauli on original
    /// qubit `qubit`, found at `position` among the `live` unmeasured ones.
    LocalMeasure {
        qubit: usize,
        position: usize,
        live: usize,
        single: PhasedPauli,
    },
}

/// `single` placed at `position` of an otherwise trivial `n`-qubit Pauli.
pub fn embed_single(single: &PhasedPauli, position: usize, n: usize) -> PhasedPauli {
    let mut idx = PauliIndex::identity(n);
    idx.set_x(position, single.index().xbit(0));
    idx.set_z(position, single.index().zbit(0));
    PhasedPauli::new(single.phase(), idx)
}

/// Case table of a measurement step, validated.
#[derive(Clone, Debug)]
struct Cases {
    by_key: BTreeMap<String, PhasedPauli>,
    default: Option<PhasedPauli>,
}

impl Cases {
    fn parse(
        raw: &BTreeMap<String, String>,
        key_len: usize,
        step: usize,
        accept: impl Fn(&PhasedPauli) -> bool,
        what: &str,
    ) -> Result<Self> {
        let mut by_key = BTreeMap::new();
        let mut default = None;
        for (key, value) in raw {
            let p = PhasedPauli::parse(value).map_err(|e| step_err(step, e.to_string()))?;
            if !accept(&p) {
                return Err(step_err(step, format!("{value} is not {what}")));
            }
            if key.is_empty() {
                default = Some(p);
            } else if key.len() != key_len || key.chars().any(|c| c != '0' && c != '1') {
                return Err(step_err(step, format!("case key {key:?} is not a {key_len}-bit history")));
            } else {
                by_key.insert(key.clone(), p);
            }
        }
        if default.is_none() {
            let complete = key_len < usize::BITS as usize && by_key.len() == 1usize << key_len;
            if !complete {
                return Err(step_err(
                    step,
                    format!("cases cover {} of the {key_len}-bit histories and no default is given", by_key.len()),
                ));
            }
        }
        Ok(Self { by_key, default })
    }

    fn get(&self, history: &[bool]) -> &PhasedPauli {
        if self.by_key.is_empty() {
            return self.default.as_ref().expect("validated");
        }
        let key: String = history.iter().map(|&b| if b { '1' } else { '0' }).collect();
        self.by_key.get(&key).or(self.default.as_ref()).expect("validated")
    }
}

#[derive(Clone, Debug)]
enum PlanKind {
    Gate(CliffordGate),
    Measure(Cases),
    LocalMeasure { qubit: usize, position: usize, live: usize, feedforward: Option<(Vec<bool>, bool)>, cases: Cases },
}

/// A validated step that resolves to an [`Action`] for any history.
/// Feedforward steps are folded into the measurement they select.
#[derive(Clone, Debug)]
pub struct StepPlan {
    /// Index of the source step in the circuit.
    pub step: usize,
    /// Outcome bits recorded before this step.
    pub history_bits: usize,
    kind: PlanKind,
}

impl StepPlan {
    pub fn is_measurement(&self) -> bool {
        !matches!(self.kind, PlanKind::Gate(_))
    }

    /// Action taken after the outcome history `history`.
    pub fn action(&self, history: &[bool]) -> Action {
        debug_assert_eq!(history.len(), self.history_bits);
        match &self.kind {
            PlanKind::Gate(g) => Action::Gate(*g),
            PlanKind::Measure(cases) => Action::Measure(cases.get(history).clone()),
            PlanKind::LocalMeasure { qubit, position, live, feedforward, cases } => {
                let single = match feedforward {
                    Some((affine, constant)) => {
                        let f = affine.iter().zip(history).fold(*constant, |acc, (&c, &b)| acc ^ (c && b));
                        cases.get(&[f])
                    }
                    None => cases.get(history),
                };
                Action::LocalMeasure { qubit: *qubit, position: *position, live: *live, single: single.clone() }
            }
        }
    }
}

/// One compiled stage: a dense instrument plus the bookkeeping around it.
#[derive(Clone, Debug)]
pub struct Stage {
    /// Index of the source step, `None` for the preparation.
    pub step: Option<usize>,
    pub instrument: DenseInstrument,
    pub qubits_in: usize,
    pub qubits_out: usize,
}

/// Born distribution over outcome histories with conditional post-states.
#[derive(Clone, Debug)]
pub struct BornResult {
    pub distribution: BTreeMap<String, f64>,
    pub post_states: BTreeMap<String, DenseOperator>,
}

fn step_err(step: usize, msg: impl Into<String>) -> Error {
    Error::Step { step, msg: msg.into() }
}

fn bits_of(v: &[u8], step: usize) -> Result<Vec<bool>> {
    v.iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(step_err(step, format!("{b} is not a bit"))),
        })
        .collect()
}

impl AdaptiveComputation {
    pub fn from_json(s: &str) -> Result<Self> {
        let comp: Self = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        comp.validate()?;
        Ok(comp)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serializes")
    }

    /// Structural checks: qubit ranges, model restrictions, history
    /// arities, affine feedforward placement and destructive bookkeeping.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Precondition("circuit needs at least one qubit".into()));
        }
        if let Resource::Explicit { state } = &self.resource {
            if state.qubits() != Some(self.n) {
                return Err(Error::Dimension(format!("explicit resource is not an {}-qubit state", self.n)));
            }
        }
        for &[i, j] in &self.graph {
            if i >= self.n || j >= self.n || i == j {
                return Err(Error::InvalidInput(format!("bad graph edge [{i}, {j}]")));
            }
        }
        if !self.graph.is_empty() && self.model != Model::LocalPauli {
            return Err(Error::InvalidInput("only the local_pauli model takes a graph".into()));
        }
        self.plans().map(|_| ())
    }

    /// Validated step plans in order.
    pub fn plans(&self) -> Result<Vec<StepPlan>> {
        let mut live: Vec<usize> = (0..self.n).collect();
        let mut h = 0usize;
        let mut pending_ff: Option<(Vec<bool>, bool, usize)> = None;
        let mut plans = Vec::new();
        for (k, step) in self.steps.iter().enumerate() {
            if pending_ff.is_some() && !matches!(step, Step::LocalMeasure { .. }) {
                return Err(step_err(k, "feedforward must be followed by local_measure"));
            }
            let kind = match step {
                Step::Gate { name, qubits } => {
                    if self.model != Model::Clifford {
                        return Err(step_err(k, format!("{:?} model does not allow gates", self.model)));
                    }
                    let g = CliffordGate::from_name(name, qubits).map_err(|e| step_err(k, e.to_string()))?;
                    g.check(self.n).map_err(|e| step_err(k, e.to_string()))?;
                    PlanKind::Gate(g)
                }
                Step::Measure { cases } => {
                    if self.model == Model::LocalPauli {
                        return Err(step_err(k, "local_pauli model only allows local_measure"));
                    }
                    let n = self.n;
                    let what = format!("a Hermitian {n}-qubit Pauli");
                    PlanKind::Measure(Cases::parse(cases, h, k, |p| p.n() == n && p.is_hermitian(), &what)?)
                }
                Step::Feedforward { affine, constant } => {
                    if self.model != Model::LocalPauli {
                        return Err(step_err(k, "feedforward belongs to the local_pauli model"));
                    }
                    let affine = bits_of(affine, k)?;
                    let constant = bits_of(&[*constant], k)?[0];
                    if affine.len() != h {
                        return Err(step_err(
                            k,
                            format!("affine map has arity {}, history has {h} bits", affine.len()),
                        ));
                    }
                    pending_ff = Some((affine, constant, k));
                    continue;
                }
                Step::LocalMeasure { qubit, cases } => {
                    if self.model != Model::LocalPauli {
                        return Err(step_err(k, "local_measure belongs to the local_pauli model"));
                    }
                    let position = live
                        .iter()
                        .position(|q| q == qubit)
                        .ok_or_else(|| step_err(k, format!("qubit {qubit} is out of range or already measured")))?;
                    let feedforward = pending_ff.take().map(|(affine, constant, _)| (affine, constant));
                    let key_len = if feedforward.is_some() { 1 } else { h };
                    let single = |p: &PhasedPauli| p.n() == 1 && p.is_hermitian() && !p.index().is_identity();
                    let cases = Cases::parse(cases, key_len, k, single, "a signed single-qubit X, Y or Z")?;
                    let kind = PlanKind::LocalMeasure { qubit: *qubit, position, live: live.len(), feedforward, cases };
                    live.remove(position);
                    kind
                }
            };
            let measures = !matches!(kind, PlanKind::Gate(_));
            plans.push(StepPlan { step: k, history_bits: h, kind });
            if measures {
                h += 1;
            }
        }
        if let Some((_, _, k)) = pending_ff {
            return Err(step_err(k, "feedforward must be followed by local_measure"));
        }
        Ok(plans)
    }

    /// Number of binary outcomes a full run records.
    pub fn outcome_bits(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Measure { .. } | Step::LocalMeasure { .. })).count()
    }

    /// The state `Phi_0` prepares: the resource, entangled by `U_G` in the
    /// local model.
    pub fn initial_state(&self) -> Result<DenseOperator> {
        let mut rho = self.resource.state(self.n)?;
        for &[i, j] in &self.graph {
            rho = rho.conjugate_by(&CliffordGate::Cz(i, j).unitary(self.n)?)?;
        }
        Ok(rho)
    }

    /// Compiles to dense stages: the preparation from the scalars first,
    /// then one instrument per non-feedforward step.
    pub fn instruments(&self) -> Result<Vec<Stage>> {
        check_dense_size(self.n, "dense compilation")?;
        let prep = DenseInstrument::preparation(&self.initial_state()?)?;
        let mut stages = vec![Stage { step: None, instrument: prep, qubits_in: 0, qubits_out: self.n }];
        let mut live = self.n;
        for plan in self.plans()? {
            let h = plan.history_bits;
            if h > MAX_DENSE_HISTORY {
                return Err(Error::TooLarge { what: "dense compilation (outcome history bits)", n: h });
            }
            let k = plan.step;
            let inputs: Vec<String> = (0..1usize << h).map(|i| history_label(i, h)).collect();
            let dim = 1usize << live;
            let actions: Vec<Action> = (0..1usize << h).map(|i| plan.action(&history_bits(i, h))).collect();
            let (instrument, out) = match &actions[0] {
                Action::Gate(g) => {
                    let u = g.unitary(self.n)?;
                    let kraus = vec![vec![vec![u]]; inputs.len()];
                    (DenseInstrument::new(inputs, vec!["*".into()], dim, dim, kraus)?, live)
                }
                Action::Measure(_) | Action::LocalMeasure { .. } => {
                    let destructive = matches!(actions[0], Action::LocalMeasure { .. });
                    let mut kraus = Vec::with_capacity(actions.len());
                    for act in &actions {
                        let instr = match act {
                            Action::Measure(p) => pauli_measurement_instrument(p, false, None)?,
                            Action::LocalMeasure { position, live, single, .. } => pauli_measurement_instrument(
                                &embed_single(single, *position, *live),
                                true,
                                Some(*position),
                            )?,
                            Action::Gate(_) => unreachable!("a step resolves to one kind of action"),
                        };
                        kraus.push((0..2).map(|s| instr.kraus(0, s).to_vec()).collect());
                    }
                    let out = if destructive { live - 1 } else { live };
                    let instrument = DenseInstrument::new(inputs, vec!["0".into(), "1".into()], dim, 1 << out, kraus)?;
                    (instrument, out)
                }
            };
            stages.push(Stage { step: Some(k), instrument, qubits_in: live, qubits_out: out });
            live = out;
        }
        Ok(stages)
    }

    /// The whole computation as one instrument from the scalars.
    pub fn composite(&self) -> Result<DenseInstrument> {
        let stages = self.instruments()?;
        let mut acc = stages[0].instrument.clone();
        for st in &stages[1..] {
            acc = star_compose(&acc, &st.instrument)?;
        }
        Ok(acc)
    }
}

/// Bits of history `index`, first outcome first.
pub fn history_bits(index: usize, h: usize) -> Vec<bool> {
    (0..h).map(|i| index >> (h - 1 - i) & 1 == 1).collect()
}

/// Exact Born rule over every outcome history, with normalized post-states
/// for branches of nonzero probability.
pub fn evaluate_born(comp: &AdaptiveComputation) -> Result<BornResult> {
    let stages = comp.instruments()?;
    let rho = crate::oracle::apply_cp(&stages[0].instrument, 0, 0, &DenseOperator::identity(1))?;
    let mut result = BornResult { distribution: BTreeMap::new(), post_states: BTreeMap::new() };
    descend(&stages[1..], 0, 0, rho, &mut result)?;
    Ok(result)
}

fn descend(stages: &[Stage], history: usize, h: usize, state: DenseOperator, out: &mut BornResult) -> Result<()> {
    let Some((stage, rest)) = stages.split_first() else {
        let p = state.trace().re;
        let label = history_label(history, h);
        out.post_states.insert(label.clone(), state.scale_real(1.0 / p));
        out.distribution.insert(label, p);
        return Ok(());
    };
    let outcomes = stage.instrument.outcomes().len();
    for s in 0..outcomes {
        let next = crate::oracle::apply_cp(&stage.instrument, history, s, &state)?;
        if next.trace().re <= ZERO_BRANCH {
            continue;
        }
        let (hist, len) = if outcomes == 1 { (history, h) } else { (history * 2 + s, h + 1) };
        descend(rest, hist, len, next, out)?;
    }
    Ok(())
}
