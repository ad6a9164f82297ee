//! The `polysim` command line.
//!
//! Every verb reads JSON, validates it, and prints one JSON report. Exit
//! codes: 0 success, 1 verification failure, 2 bad input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::adaptive::{evaluate_born, AdaptiveComputation};
use crate::cnc::enumerate_maximal_cnc;
use crate::engine::{
    estimate_quasi, propagate_exact, random_clifford_circuit, run_tableau_fast, sample, sample_distribution, Backend,
    Event, VertexModel, DIAGRAM_TOL,
};
use crate::geometry::{
    check_preservation, dual_vertices, robustness, robustness_exact, Arithmetic, CoeffVector, UpdateMapTable,
    VertexSet, ViolationKind,
};
use crate::oracle::{pauli_measurement_instrument, DenseInstrument, DenseOperator, TOL};
use crate::pauli::{CliffordGate, PhasedPauli};
use crate::{Error, VERSION};

#[derive(Parser, Debug)]
#[command(name = "polysim", version, about = "Polyhedral classical simulators for qubit circuits")]
pub struct Cli {
    /// Worker threads for shot sampling (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    /// Pure stabilizer states.
    Stabilizer,
    /// Product stabilizer states.
    Local,
    /// Maximal CNC operators.
    Cnc,
    /// Vertices of the dual of the stabilizer polytope.
    PauliPolytope,
    /// Vertices of the dual of the local stabilizer polytope.
    LocalPolytope,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a circuit and report its outcome distribution or counts.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "oracle")]
        backend: Backend,
        /// Sample this many shots instead of reporting the exact distribution.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Vertex sets for the vertex backend: a JSON file or a builtin such
        /// as `stabilizer:2`, `local:1`, `cnc:1`, `scalar`.
        #[arg(long)]
        vertices: Vec<String>,
        /// Precomputed update-map tables (output of `derive-updates`).
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Quasi-probability estimate of an outcome event.
    Estimate {
        #[arg(long)]
        circuit: PathBuf,
        /// Pattern over outcome bits, e.g. `0*1`.
        #[arg(long)]
        event: String,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        vertices: Vec<String>,
    },
    /// Robustness of a state with respect to a vertex set.
    Robustness {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        vertices: String,
        /// Solve over the rationals.
        #[arg(long)]
        exact: bool,
    },
    /// List a named vertex family.
    Enumerate {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        n: usize,
        /// Allow the slow two-qubit polytope enumerations.
        #[arg(long)]
        large: bool,
    },
    /// Check that an instrument maps one polytope into the cone of another.
    CheckPreservation {
        /// Check every stage of this circuit.
        #[arg(long, conflicts_with = "instrument")]
        circuit: Option<PathBuf>,
        /// A single instrument: `measure:<pauli>`, `destructive:<pauli>` or
        /// `gate:<name>`.
        #[arg(long)]
        instrument: Option<String>,
        /// Input set, then output set (one value means both).
        #[arg(long)]
        vertices: Vec<String>,
    },
    /// Derive update-map tables for every stage of a circuit.
    DeriveUpdates {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        vertices: Vec<String>,
        #[arg(long)]
        exact: bool,
    },
    /// Time the tableau on a random Clifford circuit.
    Bench {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        gates: usize,
        #[arg(long, default_value_t = 1000)]
        measurements: usize,
        #[arg(long, default_value_t = 1)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::BadInput(_) | CliError::Io(_) => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Report plus a verdict: `false` maps to exit code 1.
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

/// Reads inputs and records their SHA-256 digests.
#[derive(Default)]
struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn read(&mut self, name: &str, path: &Path) -> CliResult<String> {
        let bytes = std::fs::read(path).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
        self.0.insert(name.to_string(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|_| CliError::BadInput(format!("{} is not UTF-8", path.display())))
    }

    fn circuit(&mut self, path: &Path) -> CliResult<AdaptiveComputation> {
        Ok(AdaptiveComputation::from_json(&self.read("circuit", path)?)?)
    }

    /// A builtin family or a file holding one set or `{"sets": [...]}`.
    fn vertex_sets(&mut self, key: &str, spec: &str) -> CliResult<Vec<VertexSet>> {
        if let Some(set) = builtin_set(spec)? {
            self.0.insert(key.to_string(), format!("builtin:{spec}"));
            return Ok(vec![set]);
        }
        let text = self.read(key, Path::new(spec))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::BadInput(format!("{spec}: {e}")))?;
        let parse =
            |v: Value| serde_json::from_value::<VertexSet>(v).map_err(|e| CliError::BadInput(format!("{spec}: {e}")));
        match value {
            Value::Object(mut m) if m.contains_key("sets") => match m.remove("sets") {
                Some(Value::Array(items)) => items.into_iter().map(parse).collect(),
                _ => Err(CliError::BadInput(format!("{spec}: \"sets\" must be an array"))),
            },
            other => Ok(vec![parse(other)?]),
        }
    }

    fn all_sets(&mut self, specs: &[String]) -> CliResult<Vec<VertexSet>> {
        let mut out = Vec::new();
        for (i, s) in specs.iter().enumerate() {
            out.extend(self.vertex_sets(&format!("vertices[{i}]"), s)?);
        }
        Ok(out)
    }
}

fn builtin_set(spec: &str) -> CliResult<Option<VertexSet>> {
    if spec == "scalar" {
        return Ok(Some(VertexSet::scalar()));
    }
    let Some((name, n)) = spec.split_once(':') else { return Ok(None) };
    let Ok(n) = n.parse::<usize>() else { return Ok(None) };
    let what = match name {
        "stabilizer" => What::Stabilizer,
        "local" => What::Local,
        "cnc" => What::Cnc,
        "pauli-polytope" => What::PauliPolytope,
        "local-polytope" => What::LocalPolytope,
        _ => return Ok(None),
    };
    Ok(Some(family(what, n, false)?))
}

fn family(what: What, n: usize, large: bool) -> CliResult<VertexSet> {
    Ok(match what {
        What::Stabilizer => VertexSet::stabilizer(n)?,
        What::Local => VertexSet::local_stabilizer(n)?,
        What::Cnc => VertexSet::cnc(n)?,
        What::PauliPolytope => dual_vertices(&VertexSet::stabilizer(n)?, large)?,
        What::LocalPolytope => dual_vertices(&VertexSet::local_stabilizer(n)?, large)?,
    })
}

/// Vertex set for a stage with `n` live qubits: the first supplied set of
/// that size, else the stabilizer set (or the scalars at `n = 0`).
fn pick_set(sets: &[VertexSet], n: usize) -> crate::Result<VertexSet> {
    match sets.iter().find(|s| s.n() == n) {
        Some(s) => Ok(s.clone()),
        None if n == 0 => Ok(VertexSet::scalar()),
        None => VertexSet::stabilizer(n),
    }
}

fn t_gate(dagger: bool) -> DenseOperator {
    let phase = Complex64::from_polar(1.0, if dagger { -1.0 } else { 1.0 } * std::f64::consts::FRAC_PI_4);
    DenseOperator::from_fn(2, 2, |r, c| match (r, c) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (1, 1) => phase,
        _ => Complex64::new(0.0, 0.0),
    })
}

fn parse_instrument(spec: &str) -> CliResult<DenseInstrument> {
    let bad = || {
        CliError::BadInput(format!("instrument {spec:?}: expected measure:<pauli>, destructive:<pauli> or gate:<name>"))
    };
    let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
    let hermitian = |s: &str| -> CliResult<PhasedPauli> {
        let p = PhasedPauli::parse(s)?;
        if !p.is_hermitian() || p.index().is_identity() {
            return Err(CliError::BadInput(format!("{s} is not a Hermitian non-identity Pauli")));
        }
        Ok(p)
    };
    Ok(match kind {
        "measure" => pauli_measurement_instrument(&hermitian(arg)?, false, None)?,
        "destructive" => {
            let p = hermitian(arg)?;
            if p.n() != 1 {
                return Err(CliError::BadInput("destructive instruments act on one qubit".into()));
            }
            pauli_measurement_instrument(&p, true, Some(0))?
        }
        "gate" => match arg.to_ascii_uppercase().as_str() {
            "T" => DenseInstrument::unitary(t_gate(false))?,
            "TDG" => DenseInstrument::unitary(t_gate(true))?,
            name => {
                let qubits: Vec<usize> = if matches!(name, "CZ" | "CNOT" | "CX") { vec![0, 1] } else { vec![0] };
                DenseInstrument::unitary(CliffordGate::from_name(name, &qubits)?.unitary(qubits.len())?)?
            }
        },
        _ => return Err(bad()),
    })
}

fn parse_state(text: &str) -> CliResult<CoeffVector> {
    let op: DenseOperator = serde_json::from_str(text).map_err(|e| CliError::BadInput(format!("state: {e}")))?;
    Ok(CoeffVector::from_operator(&op)?)
}

fn check_unit(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(CliError::BadInput(format!("--{name} must lie in (0, 1)")))
    }
}

fn load_tables(inputs: &mut Inputs, path: &Path) -> CliResult<Vec<UpdateMapTable>> {
    #[derive(serde::Deserialize)]
    struct File {
        tables: Vec<UpdateMapTable>,
    }
    let text = inputs.read("tables", path)?;
    let f: File = serde_json::from_str(&text).map_err(|e| CliError::BadInput(format!("tables: {e}")))?;
    Ok(f.tables)
}

fn stage_sets(comp: &AdaptiveComputation, sets: &[VertexSet]) -> CliResult<Vec<VertexSet>> {
    Ok(comp.instruments()?.iter().map(|st| pick_set(sets, st.qubits_out)).collect::<crate::Result<_>>()?)
}

fn counts_json(counts: BTreeMap<String, u64>) -> Value {
    json!(counts)
}

/// Runs one parsed command.
pub fn dispatch(cmd: &Command) -> CliResult<Outcome> {
    let mut inputs = Inputs::default();
    let mut seed_used = None;
    let (mut report, ok) = match cmd {
        Command::Simulate { circuit, backend, shots, seed, vertices, tables } => {
            let comp = inputs.circuit(circuit)?;
            let sets = inputs.all_sets(vertices)?;
            if *backend != Backend::Vertex && (!sets.is_empty() || tables.is_some()) {
                return Err(CliError::BadInput("--vertices and --tables only apply to the vertex backend".into()));
            }
            if shots == &Some(0) {
                return Err(CliError::BadInput("--shots must be at least 1".into()));
            }
            if shots.is_some() {
                seed_used = Some(*seed);
            }
            let mut r = json!({ "backend": backend });
            match backend {
                Backend::Oracle => {
                    let born = evaluate_born(&comp)?;
                    match shots {
                        Some(s) => r["counts"] = counts_json(sample_distribution(&born.distribution, *s, *seed)),
                        None => r["distribution"] = json!(born.distribution),
                    }
                }
                Backend::Tableau => {
                    let s = shots.ok_or_else(|| CliError::BadInput("the tableau backend needs --shots".into()))?;
                    r["counts"] = counts_json(run_tableau_fast(&comp, s, *seed)?.counts);
                }
                Backend::Vertex => {
                    let model = match tables {
                        Some(path) => {
                            let tables = load_tables(&mut inputs, path)?;
                            VertexModel::new(stage_sets(&comp, &sets)?, tables)?
                        }
                        None => VertexModel::derive(&comp, |n| pick_set(&sets, n), Arithmetic::Exact)?,
                    };
                    let err = model.diagram_error(&comp)?;
                    if err > DIAGRAM_TOL {
                        return Err(CliError::Failed(format!(
                            "simulation diagram error {err:e} exceeds {DIAGRAM_TOL:e}"
                        )));
                    }
                    r["diagram_error"] = json!(err);
                    match shots {
                        Some(s) => r["counts"] = counts_json(sample(&comp, &model, *s, *seed)?),
                        None => r["distribution"] = json!(propagate_exact(&comp, &model)?),
                    }
                }
            }
            (r, true)
        }
        Command::Estimate { circuit, event, epsilon, delta, seed, vertices } => {
            check_unit("epsilon", *epsilon)?;
            check_unit("delta", *delta)?;
            let comp = inputs.circuit(circuit)?;
            let sets = inputs.all_sets(vertices)?;
            let event = Event::parse(event)?;
            seed_used = Some(*seed);
            let model = VertexModel::derive(&comp, |n| pick_set(&sets, n), Arithmetic::Exact)?;
            let rho = CoeffVector::from_operator(&comp.initial_state()?)?;
            let dec = robustness(&rho, &model.stages()[0])?;
            let est = estimate_quasi(&comp, &model, &dec, &event, *epsilon, *delta, *seed)?;
            let r = json!({ "estimate": {
                "event": est.event, "p_hat": est.estimate, "epsilon": est.epsilon, "delta": est.delta,
                "N": est.samples, "negativity": est.negativity, "bound": est.bound,
            }});
            (r, true)
        }
        Command::Robustness { state, vertices, exact } => {
            let rho = parse_state(&inputs.read("state", state)?)?;
            let set = single_set(inputs.vertex_sets("vertices", vertices)?)?;
            let (value, weights, exact_value) = if *exact {
                let d = robustness_exact(&rho, &set)?;
                let w: Vec<f64> = d.weights.iter().map(|x| num::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)).collect();
                (num::ToPrimitive::to_f64(&d.negativity).unwrap_or(f64::NAN), w, Some(d.negativity.to_string()))
            } else {
                let d = robustness(&rho, &set)?;
                (d.negativity, d.weights, None)
            };
            let weights: BTreeMap<&str, f64> =
                set.labels().iter().map(String::as_str).zip(weights).filter(|(_, w)| *w != 0.0).collect();
            let mut r = json!({ "value": value, "weights": weights });
            if let Some(q) = exact_value {
                r["exact"] = json!(q);
            }
            (r, true)
        }
        Command::Enumerate { what, n, large } => {
            let set = family(*what, *n, *large)?;
            let mut r = json!({ "what": what_name(*what), "n": n, "count": set.len(), "labels": set.labels() });
            if *what == What::Cnc {
                let cnc = enumerate_maximal_cnc(*n)?;
                r["labels"] = json!(cnc.iter().map(ToString::to_string).collect::<Vec<_>>());
            }
            r["vertices"] = serde_json::to_value(&set).map_err(|e| CliError::BadInput(e.to_string()))?;
            (r, true)
        }
        Command::CheckPreservation { circuit, instrument, vertices } => {
            let sets = inputs.all_sets(vertices)?;
            let mut checks: Vec<(String, DenseInstrument, VertexSet, VertexSet)> = Vec::new();
            match (circuit, instrument) {
                (Some(path), None) => {
                    let comp = inputs.circuit(path)?;
                    for st in comp.instruments()?.into_iter().skip(1) {
                        let from = pick_set(&sets, st.qubits_in)?;
                        let to = pick_set(&sets, st.qubits_out)?;
                        checks.push((format!("step {}", st.step.unwrap_or(0)), st.instrument, from, to));
                    }
                }
                (None, Some(spec)) => {
                    let instr = parse_instrument(spec)?;
                    let (from, to) = match sets.as_slice() {
                        [one] => (one.clone(), one.clone()),
                        [a, b] => (a.clone(), b.clone()),
                        _ => return Err(CliError::BadInput("give one or two --vertices sets".into())),
                    };
                    checks.push((spec.clone(), instr, from, to));
                }
                _ => return Err(CliError::BadInput("give exactly one of --circuit or --instrument".into())),
            }
            let mut results = Vec::new();
            let mut all_ok = true;
            for (name, instr, from, to) in &checks {
                let rep = check_preservation(instr, from, to, TOL)?;
                all_ok &= rep.passed();
                let violations: Vec<Value> = rep
                    .violations
                    .iter()
                    .map(|v| {
                        let (kind, detail) = match &v.kind {
                            ViolationKind::NegativeTrace { trace } => ("negative_trace", json!({ "trace": trace })),
                            ViolationKind::OutsideHull { trace, image, functional } => {
                                ("outside_hull", json!({ "trace": trace, "image": image, "functional": functional }))
                            }
                            ViolationKind::NonzeroImage { norm } => ("nonzero_image", json!({ "norm": norm })),
                        };
                        json!({ "x": v.x, "a": v.a, "s": v.s, "kind": kind, "detail": detail })
                    })
                    .collect();
                results.push(json!({
                    "instrument": name, "from_n": from.n(), "to_n": to.n(),
                    "checked": rep.checked, "passed": rep.passed(), "violations": violations,
                }));
            }
            (json!({ "passed": all_ok, "checks": results }), all_ok)
        }
        Command::DeriveUpdates { circuit, vertices, exact } => {
            let comp = inputs.circuit(circuit)?;
            let sets = inputs.all_sets(vertices)?;
            let arith = if *exact { Arithmetic::Exact } else { Arithmetic::Float };
            let model = VertexModel::derive(&comp, |n| pick_set(&sets, n), arith)?;
            let err = model.diagram_error(&comp)?;
            let ok = err <= DIAGRAM_TOL;
            let stages: Vec<Value> =
                model.stages().iter().map(|s| json!({ "n": s.n(), "labels": s.labels() })).collect();
            let r = json!({ "stages": stages, "tables": model.tables(), "diagram_error": err });
            (r, ok)
        }
        Command::Bench { n, gates, measurements, shots, seed } => {
            if *shots == 0 {
                return Err(CliError::BadInput("--shots must be at least 1".into()));
            }
            seed_used = Some(*seed);
            let comp = random_clifford_circuit(*n, *gates, *measurements, *seed)?;
            let run = run_tableau_fast(&comp, *shots, *seed)?;
            let r =
                json!({ "n": n, "gates": gates, "measurements": measurements, "shots": shots, "timing": run.timing });
            (r, true)
        }
    };
    report["version"] = json!(VERSION);
    report["inputs"] = json!(inputs.0);
    if let Some(seed) = seed_used {
        report["seed"] = json!(seed);
    }
    Ok(Outcome { report, ok })
}

fn single_set(mut sets: Vec<VertexSet>) -> CliResult<VertexSet> {
    match sets.len() {
        1 => Ok(sets.remove(0)),
        k => Err(CliError::BadInput(format!("expected one vertex set, found {k}"))),
    }
}

fn what_name(w: What) -> &'static str {
    match w {
        What::Stabilizer => "stabilizer",
        What::Local => "local",
        What::Cnc => "cnc",
        What::PauliPolytope => "pauli-polytope",
        What::LocalPolytope => "local-polytope",
    }
}

/// Parses `args`, runs the command, writes the report, and returns the exit
/// code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = dispatch(&cli.command).and_then(|o| {
        let text = serde_json::to_string_pretty(&o.report).expect("reports serialize") + "\n";
        match &cli.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(o.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
