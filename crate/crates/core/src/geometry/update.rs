//! Preservation checks and update-map derivation.
//!
//! An instrument `Phi` preserves `(A, B)` when every image `Phi_a^s(A_x)`
//! has nonnegative trace, lies in the cone over `conv(B)` when its trace is
//! positive, and vanishes when its trace is zero. Then the normalized images
//! decompose over `B`, and those weights scaled by the trace form an update
//! map `q_{x,a}(y, s)`.

use std::collections::{BTreeMap, HashMap};

use num::{BigRational, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{membership, membership_exact, Membership};
use super::{CoeffVector, VertexSet};
use crate::lp::{snap_rational, LpScalar};
use crate::oracle::{apply_cp, join_labels, DenseInstrument, DenseOperator, TOL};
use crate::{Error, Result};

/// Arithmetic used for the per-image LPs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Float,
    /// Big-rational simplex on snapped coefficients; row sums are checked
    /// to equal one exactly.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    NegativeTrace {
        trace: f64,
    },
    /// The normalized image is outside `conv(B)`; `functional` separates it.
    OutsideHull {
        trace: f64,
        image: Vec<f64>,
        functional: Vec<f64>,
    },
    /// Trace zero but the image is not the zero operator.
    NonzeroImage {
        norm: f64,
    },
}

/// One failing `(x, a, s)` triple.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub x: String,
    pub a: String,
    pub s: String,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreservationReport {
    /// Number of `(x, a, s)` images inspected.
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl PreservationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_spaces(instr: &DenseInstrument, from: &VertexSet, to: &VertexSet) -> Result<()> {
    if instr.in_dim() != 1 << from.n() {
        return Err(Error::Dimension(format!("instrument input dimension {} vs {} qubits", instr.in_dim(), from.n())));
    }
    if instr.out_dim() != 1 << to.n() {
        return Err(Error::Dimension(format!("instrument output dimension {} vs {} qubits", instr.out_dim(), to.n())));
    }
    Ok(())
}

/// Checks both preservation conditions for every `(x, a, s)`.
pub fn check_preservation(
    instr: &DenseInstrument,
    from: &VertexSet,
    to: &VertexSet,
    tol: f64,
) -> Result<PreservationReport> {
    check_spaces(instr, from, to)?;
    let ops = from.operators()?;
    let per_x = ops
        .par_iter()
        .enumerate()
        .map(|(x, op)| {
            let mut found = Vec::new();
            for a in 0..instr.inputs().len() {
                for s in 0..instr.outcomes().len() {
                    let image = apply_cp(instr, a, s, op)?;
                    if let Some(kind) = classify(&image, to, tol)? {
                        found.push(Violation {
                            x: from.labels()[x].clone(),
                            a: instr.inputs()[a].clone(),
                            s: instr.outcomes()[s].clone(),
                            kind,
                        });
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreservationReport {
        checked: from.len() * instr.inputs().len() * instr.outcomes().len(),
        violations: per_x.into_iter().flatten().collect(),
    })
}

fn classify(image: &DenseOperator, to: &VertexSet, tol: f64) -> Result<Option<ViolationKind>> {
    let trace = image.trace().re;
    if trace < -tol {
        return Ok(Some(ViolationKind::NegativeTrace { trace }));
    }
    if trace <= tol {
        let norm = image.max_abs();
        return Ok((norm > tol).then_some(ViolationKind::NonzeroImage { norm }));
    }
    let c = CoeffVector::expand(image)?.scaled(1.0 / trace);
    Ok(match membership(&c, to)? {
        Membership::Inside { .. } => None,
        Membership::Outside { functional } => {
            Some(ViolationKind::OutsideHull { trace, image: c.coeffs().to_vec(), functional })
        }
    })
}

/// A single transition `(y, s)` with probability `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Move {
    pub y: usize,
    pub s: usize,
    pub p: f64,
}

/// Stochastic map `q_{x,a}(y, s)` stored sparsely per row `(x, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UpdateMapTable {
    x_labels: Vec<String>,
    inputs: Vec<String>,
    y_labels: Vec<String>,
    outcomes: Vec<String>,
    /// Row `x * inputs.len() + a`.
    rows: Vec<Vec<Move>>,
}

impl UpdateMapTable {
    pub fn new(
        x_labels: Vec<String>,
        inputs: Vec<String>,
        y_labels: Vec<String>,
        outcomes: Vec<String>,
        rows: Vec<Vec<Move>>,
    ) -> Result<Self> {
        if rows.len() != x_labels.len() * inputs.len() {
            return Err(Error::Dimension(format!(
                "table needs {} rows, got {}",
                x_labels.len() * inputs.len(),
                rows.len()
            )));
        }
        for m in rows.iter().flatten() {
            if m.y >= y_labels.len() || m.s >= outcomes.len() {
                return Err(Error::InvalidInput("move refers to an unknown label".into()));
            }
            if m.p.is_nan() || m.p < 0.0 {
                return Err(Error::InvalidInput(format!("negative or missing probability {}", m.p)));
            }
        }
        Ok(Self { x_labels, inputs, y_labels, outcomes, rows })
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn moves(&self, x: usize, a: usize) -> &[Move] {
        &self.rows[x * self.inputs.len() + a]
    }

    /// Largest `|sum_{y,s} q_{x,a}(y, s) - 1|` over rows.
    pub fn row_sum_error(&self) -> f64 {
        self.rows.iter().map(|row| (row.iter().map(|m| m.p).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Adaptive composite `next * self`: the outcome `(s, r)` has index
    /// `s * |next outcomes| + r`.
    pub fn star(&self, next: &UpdateMapTable) -> Result<UpdateMapTable> {
        if next.x_labels != self.y_labels {
            return Err(Error::InvalidInput("second table must start where the first ends".into()));
        }
        if next.inputs != self.outcomes {
            return Err(Error::InvalidInput("second table's inputs must be the first table's outcomes".into()));
        }
        let theta = next.outcomes.len();
        let outcomes =
            self.outcomes.iter().flat_map(|s| next.outcomes.iter().map(move |r| join_labels(s, r))).collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
                for m in row {
                    for m2 in next.moves(m.y, m.s) {
                        *acc.entry((m2.y, m.s * theta + m2.s)).or_default() += m.p * m2.p;
                    }
                }
                acc.into_iter().map(|((y, s), p)| Move { y, s, p }).collect()
            })
            .collect();
        UpdateMapTable::new(self.x_labels.clone(), self.inputs.clone(), next.y_labels.clone(), outcomes, rows)
    }
}

#[derive(Serialize, Deserialize)]
struct MoveJson {
    y: String,
    s: String,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    x: String,
    a: String,
    moves: Vec<MoveJson>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    x_labels: Vec<String>,
    inputs: Vec<String>,
    y_labels: Vec<String>,
    outcomes: Vec<String>,
    entries: Vec<EntryJson>,
}

impl Serialize for UpdateMapTable {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut entries = Vec::with_capacity(self.rows.len());
        for (x, xl) in self.x_labels.iter().enumerate() {
            for (a, al) in self.inputs.iter().enumerate() {
                let moves = self
                    .moves(x, a)
                    .iter()
                    .map(|m| MoveJson { y: self.y_labels[m.y].clone(), s: self.outcomes[m.s].clone(), p: m.p })
                    .collect();
                entries.push(EntryJson { x: xl.clone(), a: al.clone(), moves });
            }
        }
        TableJson {
            x_labels: self.x_labels.clone(),
            inputs: self.inputs.clone(),
            y_labels: self.y_labels.clone(),
            outcomes: self.outcomes.clone(),
            entries,
        }
        .serialize(ser)
    }
}

fn index_of(labels: &[String]) -> HashMap<&str, usize> {
    labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
}

impl<'de> Deserialize<'de> for UpdateMapTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TableJson::deserialize(d)?;
        let (xi, ai, yi, si) =
            (index_of(&raw.x_labels), index_of(&raw.inputs), index_of(&raw.y_labels), index_of(&raw.outcomes));
        let lookup = |map: &HashMap<&str, usize>, l: &str| {
            map.get(l).copied().ok_or_else(|| D::Error::custom(format!("unknown label {l:?}")))
        };
        let mut rows: Vec<Option<Vec<Move>>> = vec![None; raw.x_labels.len() * raw.inputs.len()];
        for e in &raw.entries {
            let r = lookup(&xi, &e.x)? * raw.inputs.len() + lookup(&ai, &e.a)?;
            let moves = e
                .moves
                .iter()
                .map(|m| Ok(Move { y: lookup(&yi, &m.y)?, s: lookup(&si, &m.s)?, p: m.p }))
                .collect::<std::result::Result<Vec<_>, D::Error>>()?;
            if rows[r].replace(moves).is_some() {
                return Err(D::Error::custom(format!("duplicate entry ({}, {})", e.x, e.a)));
            }
        }
        let rows = rows
            .into_iter()
            .map(|r| r.ok_or_else(|| D::Error::custom("table is missing an (x, a) entry")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        UpdateMapTable::new(raw.x_labels, raw.inputs, raw.y_labels, raw.outcomes, rows).map_err(D::Error::custom)
    }
}

const VERTEX_MATCH: f64 = 1e-12;

/// Decomposes one image over `to`, returning `(y, p)` pairs.
fn decompose(image: &DenseOperator, to: &VertexSet, arith: Arithmetic) -> Result<Vec<(usize, Probability)>> {
    let trace = image.trace().re;
    let c = CoeffVector::expand(image)?.scaled(1.0 / trace);
    let outside = || Error::Preservation("normalized image lies outside the target hull".into());
    // Images that land on a vertex need no LP.
    if let Some(y) = to.vectors().iter().position(|v| v.max_abs_diff(&c) <= VERTEX_MATCH) {
        let p = match arith {
            Arithmetic::Float => Probability::Float(trace),
            Arithmetic::Exact => Probability::Exact(snap_rational(trace)),
        };
        return Ok(vec![(y, p)]);
    }
    Ok(match arith {
        Arithmetic::Float => match membership(&c, to)? {
            Membership::Inside { weights } => weights
                .into_iter()
                .enumerate()
                .filter(|(_, w)| *w > 0.0)
                .map(|(y, w)| (y, Probability::Float(w * trace)))
                .collect(),
            Membership::Outside { .. } => return Err(outside()),
        },
        Arithmetic::Exact => match membership_exact(&c, to)? {
            Membership::Inside { weights } => {
                let t = snap_rational(trace);
                weights
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| w.is_pos())
                    .map(|(y, w)| (y, Probability::Exact(w * t.clone())))
                    .collect()
            }
            Membership::Outside { .. } => return Err(outside()),
        },
    })
}

enum Probability {
    Float(f64),
    Exact(BigRational),
}

/// Builds an update map for `instr` from `from` to `to`.
///
/// Each positive-trace image is split over `to` by an LP; the table is
/// revalidated against the reproduction identity before it is returned.
pub fn derive_update_map(
    instr: &DenseInstrument,
    from: &VertexSet,
    to: &VertexSet,
    arith: Arithmetic,
) -> Result<UpdateMapTable> {
    check_spaces(instr, from, to)?;
    let ops = from.operators()?;
    let n_in = instr.inputs().len();
    let rows = (0..from.len() * n_in)
        .into_par_iter()
        .map(|row| {
            let (x, a) = (row / n_in, row % n_in);
            let mut moves = Vec::new();
            let mut exact_sum = <BigRational as Zero>::zero();
            for s in 0..instr.outcomes().len() {
                let image = apply_cp(instr, a, s, &ops[x])?;
                let trace = image.trace().re;
                let at = || format!("x={}, a={}, s={}", from.labels()[x], instr.inputs()[a], instr.outcomes()[s]);
                if trace < -TOL {
                    return Err(Error::Preservation(format!("negative trace {trace} at {}", at())));
                }
                if trace <= TOL {
                    if image.max_abs() > TOL {
                        return Err(Error::Preservation(format!("trace-zero image is nonzero at {}", at())));
                    }
                    continue;
                }
                let parts = decompose(&image, to, arith).map_err(|e| match e {
                    Error::Preservation(msg) => Error::Preservation(format!("{msg} at {}", at())),
                    other => other,
                })?;
                for (y, p) in parts {
                    let p = match p {
                        Probability::Float(p) => p,
                        Probability::Exact(p) => {
                            exact_sum += p.clone();
                            p.to_f64()
                        }
                    };
                    moves.push(Move { y, s, p });
                }
            }
            if arith == Arithmetic::Exact && !exact_sum.is_one() {
                return Err(Error::Preservation(format!("row ({x}, {a}) sums to {exact_sum}, not 1")));
            }
            Ok(moves)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = UpdateMapTable::new(
        from.labels().to_vec(),
        instr.inputs().to_vec(),
        to.labels().to_vec(),
        instr.outcomes().to_vec(),
        rows,
    )?;
    let err = simulation_error(&table, instr, from, to)?;
    if err > TOL {
        return Err(Error::Lp(format!("derived table misses the reproduction identity by {err:e}")));
    }
    Ok(table)
}

/// Largest deviation in the simulation diagram: entrywise
/// `|sum_y q_{x,a}(y, s) B_y - Phi_a^s(A_x)|` over all `(x, a, s)`, and the
/// row-sum error.
pub fn simulation_error(
    table: &UpdateMapTable,
    instr: &DenseInstrument,
    from: &VertexSet,
    to: &VertexSet,
) -> Result<f64> {
    check_spaces(instr, from, to)?;
    if table.x_labels.len() != from.len() || table.y_labels.len() != to.len() {
        return Err(Error::Dimension("table labels do not match the vertex sets".into()));
    }
    if table.inputs.len() != instr.inputs().len() || table.outcomes.len() != instr.outcomes().len() {
        return Err(Error::Dimension("table labels do not match the instrument".into()));
    }
    let a_ops = from.operators()?;
    let b_ops = to.operators()?;
    let dim = instr.out_dim();
    let worst = (0..from.len())
        .into_par_iter()
        .map(|x| {
            let mut worst = 0.0f64;
            for a in 0..instr.inputs().len() {
                let mut pushed = vec![DenseOperator::zeros(dim, dim); instr.outcomes().len()];
                for m in table.moves(x, a) {
                    pushed[m.s].add_assign_scaled(&b_ops[m.y], m.p.into())?;
                }
                for (s, push) in pushed.iter().enumerate() {
                    let image = apply_cp(instr, a, s, &a_ops[x])?;
                    worst = worst.max(push.max_abs_diff(&image));
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(worst.max(table.row_sum_error()))
}
