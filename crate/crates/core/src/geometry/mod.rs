//! Polytope engine over Pauli coefficient vectors.
//!
//! A Hermitian operator on `n` qubits is stored as its coefficients
//! `c_a = Tr(T_a A) / 2^n` in the Pauli basis, listed in code order (see
//! [`PauliIndex::code`]). Trace-one operators have `c_0 = 2^{-n}`. Vertex
//! sets, convex membership, robustness, preservation checks, update maps
//! and dual vertices all work in these coordinates.

mod dual;
mod hull;
mod update;

pub use dual::dual_vertices;
pub use hull::{membership, membership_exact, robustness, robustness_exact, Decomposition, Membership};
pub use update::{
    check_preservation, derive_update_map, simulation_error, Arithmetic, Move, PreservationReport, UpdateMapTable,
    Violation, ViolationKind,
};

use std::collections::HashSet;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cnc::enumerate_maximal_cnc;
use crate::oracle::{check_dense_size, DenseOperator, TOL};
use crate::pauli::PauliIndex;
use crate::tableau::{enumerate_stabilizer_states, StabilizerTableau};
use crate::{Error, Result};

/// Pauli-basis coefficients of a Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffVector {
    n: usize,
    coeffs: Vec<f64>,
}

/// Dense-index masks of `T_a`: qubit `q` is bit `n - 1 - q`.
fn dense_masks(a: &PauliIndex) -> (usize, usize) {
    let n = a.n();
    (0..n).fold((0, 0), |(xm, zm), q| {
        let bit = 1 << (n - 1 - q);
        (xm | if a.xbit(q) { bit } else { 0 }, zm | if a.zbit(q) { bit } else { 0 })
    })
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl CoeffVector {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dense_size(n, "coefficient vector")?;
        if coeffs.len() != 1 << (2 * n) {
            return Err(Error::Dimension(format!(
                "{n} qubits need {} coefficients, got {}",
                1 << (2 * n),
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    /// Expansion of any Hermitian operator, trace unconstrained.
    pub fn expand(a: &DenseOperator) -> Result<Self> {
        let n = a.qubits().ok_or_else(|| Error::Dimension("operator is not a square power of two".into()))?;
        check_dense_size(n, "coefficient vector")?;
        if !a.is_hermitian(TOL) {
            return Err(Error::Precondition("operator is not Hermitian".into()));
        }
        let dim = 1usize << n;
        let scale = 1.0 / dim as f64;
        let coeffs = PauliIndex::all(n)
            .map(|p| {
                let (xm, zm) = dense_masks(&p);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..dim {
                    let v = a[(j, j ^ xm)];
                    if (j & zm).count_ones() % 2 == 1 {
                        acc -= v;
                    } else {
                        acc += v;
                    }
                }
                (acc * i_pow((xm & zm).count_ones())).re * scale
            })
            .collect();
        Ok(Self { n, coeffs })
    }

    /// Expansion of a Hermitian trace-one operator.
    pub fn from_operator(a: &DenseOperator) -> Result<Self> {
        let c = Self::expand(a)?;
        let tr = c.trace();
        if (tr - 1.0).abs() > TOL {
            return Err(Error::Precondition(format!("operator has trace {tr}, expected 1")));
        }
        Ok(c)
    }

    /// `sum_a c_a T_a` as a dense matrix.
    pub fn to_operator(&self) -> Result<DenseOperator> {
        let dim = 1usize << self.n;
        let mut out = DenseOperator::zeros(dim, dim);
        for (code, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (xm, zm) = dense_masks(&PauliIndex::from_code(self.n, code));
            let ph = i_pow((xm & zm).count_ones()) * c;
            for j in 0..dim {
                let sign = if (j & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                out[(j ^ xm, j)] += ph * sign;
            }
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, a: &PauliIndex) -> f64 {
        self.coeffs[a.code()]
    }

    pub fn trace(&self) -> f64 {
        self.coeffs[0] * (1u64 << self.n) as f64
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.trace() - 1.0).abs() <= tol
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `Tr(A B)` for the operators the two vectors represent.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        let dot: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum();
        Ok(dot * (1u64 << self.n) as f64)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// A labeled finite set of trace-one operators.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexSet {
    n: usize,
    labels: Vec<String>,
    vectors: Vec<CoeffVector>,
}

/// Vectors closer than this count as duplicates.
const DUPLICATE_TOL: f64 = 1e-12;

impl VertexSet {
    pub fn new(n: usize, vertices: Vec<(String, CoeffVector)>) -> Result<Self> {
        let mut labels = Vec::with_capacity(vertices.len());
        let mut vectors: Vec<CoeffVector> = Vec::with_capacity(vertices.len());
        let mut seen = HashSet::new();
        for (label, v) in vertices {
            if v.n != n {
                return Err(Error::SizeMismatch { left: n, right: v.n });
            }
            if !v.is_normalized(DUPLICATE_TOL * 1e3) {
                return Err(Error::Precondition(format!("vertex {label} does not have trace one")));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::InvalidInput(format!("duplicate vertex label {label}")));
            }
            if vectors.iter().any(|w| w.max_abs_diff(&v) <= DUPLICATE_TOL) {
                return Err(Error::InvalidInput(format!("vertex {label} duplicates another vector")));
            }
            labels.push(label);
            vectors.push(v);
        }
        Ok(Self { n, labels, vectors })
    }

    pub fn from_operators(n: usize, ops: Vec<(String, DenseOperator)>) -> Result<Self> {
        let vertices =
            ops.into_iter().map(|(l, op)| Ok((l, CoeffVector::from_operator(&op)?))).collect::<Result<Vec<_>>>()?;
        Self::new(n, vertices)
    }

    /// The zero-qubit set `{1}`: the scalars.
    pub fn scalar() -> Self {
        Self { n: 0, labels: vec!["1".into()], vectors: vec![CoeffVector { n: 0, coeffs: vec![1.0] }] }
    }

    /// All `n`-qubit stabilizer states, `1 <= n <= 3`.
    pub fn stabilizer(n: usize) -> Result<Self> {
        let vertices = enumerate_stabilizer_states(n)?
            .iter()
            .map(|t| {
                let v = stabilizer_coeffs(t)?;
                Ok((stabilizer_label(&v), v))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, vertices)
    }

    /// Product stabilizer states: one of `+-X, +-Y, +-Z` eigenstates per
    /// qubit, `1 <= n <= 3`.
    pub fn local_stabilizer(n: usize) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(Error::TooLarge { what: "local stabilizer set (1..=3)", n });
        }
        const AXES: [(char, bool); 6] =
            [('X', false), ('X', true), ('Y', false), ('Y', true), ('Z', false), ('Z', true)];
        let w = 0.5f64.powi(n as i32);
        let mut vertices = Vec::new();
        for choice in 0..6usize.pow(n as u32) {
            let axes: Vec<(char, bool)> = (0..n).map(|q| AXES[choice / 6usize.pow((n - 1 - q) as u32) % 6]).collect();
            let coeffs = PauliIndex::all(n)
                .map(|p| {
                    (0..n).fold(w, |acc, q| match p.letter(q) {
                        'I' => acc,
                        l if l == axes[q].0 => {
                            if axes[q].1 {
                                -acc
                            } else {
                                acc
                            }
                        }
                        _ => 0.0,
                    })
                })
                .collect();
            let v = CoeffVector { n, coeffs };
            vertices.push((stabilizer_label(&v), v));
        }
        Self::new(n, vertices)
    }

    /// Maximal CNC operators, `1 <= n <= 2`.
    pub fn cnc(n: usize) -> Result<Self> {
        let vertices = enumerate_maximal_cnc(n)?
            .iter()
            .map(|l| Ok((l.to_string(), l.coefficients()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, vertices)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vectors(&self) -> &[CoeffVector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &CoeffVector {
        &self.vectors[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Dense operators of every vertex, in order.
    pub fn operators(&self) -> Result<Vec<DenseOperator>> {
        self.vectors.iter().map(CoeffVector::to_operator).collect()
    }

    /// Same vectors up to order, within `tol`.
    pub fn same_vectors(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n
            && self.len() == other.len()
            && self.vectors.iter().all(|v| other.vectors.iter().any(|w| v.max_abs_diff(w) <= tol))
    }
}

/// Coefficients of a stabilizer state from its generators.
pub fn stabilizer_coeffs(t: &StabilizerTableau) -> Result<CoeffVector> {
    let n = t.n();
    check_dense_size(n, "stabilizer coefficient vector")?;
    let gens = t.stabilizers();
    let w = 0.5f64.powi(n as i32);
    let mut coeffs = vec![0.0; 1 << (2 * n)];
    for mask in 0..1usize << n {
        let mut g = crate::pauli::PhasedPauli::identity(n);
        for (i, gi) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g = g.multiply(gi)?;
            }
        }
        let sign =
            g.sign().ok_or_else(|| Error::Precondition("stabilizer group element with imaginary phase".into()))?;
        coeffs[g.index().code()] = if sign { -w } else { w };
    }
    CoeffVector::new(n, coeffs)
}

/// Canonical generator list of a stabilizer state, such as `+XX,+ZZ`: the
/// reduced row echelon basis of its group with columns `x_0..x_{n-1},
/// z_0..z_{n-1}`.
pub fn stabilizer_label(v: &CoeffVector) -> String {
    let n = v.n;
    let width = 2 * n;
    let encode = |p: &PauliIndex| {
        (0..n).fold(0u64, |acc, q| {
            acc | (p.xbit(q) as u64) << (width - 1 - q) | (p.zbit(q) as u64) << (width - 1 - n - q)
        })
    };
    let mut rows: Vec<u64> =
        PauliIndex::all(n).filter(|p| !p.is_identity() && v.get(p).abs() > 1e-12).map(|p| encode(&p)).collect();
    let mut basis: Vec<u64> = Vec::new();
    for col in 0..width {
        let bit = 1u64 << (width - 1 - col);
        let Some(pos) = rows.iter().position(|r| r & bit != 0) else { continue };
        let pivot = rows.swap_remove(pos);
        for r in rows.iter_mut().chain(basis.iter_mut()) {
            if *r & bit != 0 {
                *r ^= pivot;
            }
        }
        rows.retain(|&r| r != 0);
        basis.push(pivot);
    }
    let parts: Vec<String> = basis
        .iter()
        .map(|&bits| {
            let mut p = PauliIndex::identity(n);
            for q in 0..n {
                p.set_x(q, bits >> (width - 1 - q) & 1 == 1);
                p.set_z(q, bits >> (width - 1 - n - q) & 1 == 1);
            }
            format!("{}{p}", if v.get(&p) < 0.0 { '-' } else { '+' })
        })
        .collect();
    parts.join(",")
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    label: String,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct VertexSetJson {
    n: usize,
    vertices: Vec<VertexJson>,
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VertexSetJson {
            n: self.n,
            vertices: self
                .labels
                .iter()
                .zip(&self.vectors)
                .map(|(l, v)| VertexJson { label: l.clone(), coeffs: v.coeffs.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = VertexSetJson::deserialize(d)?;
        let vertices = raw
            .vertices
            .into_iter()
            .map(|v| Ok((v.label, CoeffVector::new(raw.n, v.coeffs)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        VertexSet::new(raw.n, vertices).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::validate_state;
    use crate::pauli::magic_t_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expansion_examples() {
        let mixed = DenseOperator::identity(2).scale_real(0.5);
        assert_eq!(CoeffVector::from_operator(&mixed).unwrap().coeffs(), &[0.5, 0.0, 0.0, 0.0]);
        let t = CoeffVector::from_operator(&magic_t_state()).unwrap();
        let h = 1.0 / (2.0 * 2f64.sqrt());
        for (got, want) in t.coeffs().iter().zip([0.5, h, h, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(CoeffVector::from_operator(&DenseOperator::identity(2)).is_err());
    }

    #[test]
    fn round_trip_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            let dim = 1 << n;
            let entries: Vec<Complex64> = (0..dim * dim)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let mut m = DenseOperator::from_fn(dim, dim, |r, c| entries[r * dim + c]);
            m = m.add(&m.adjoint()).unwrap();
            let tr = m.trace().re;
            for i in 0..dim {
                m[(i, i)] += Complex64::new((1.0 - tr) / dim as f64, 0.0);
            }
            let c = CoeffVector::from_operator(&m).unwrap();
            assert!(c.to_operator().unwrap().approx_eq(&m, 1e-12));
        }
    }

    #[test]
    fn stabilizer_sets() {
        let sp1 = VertexSet::stabilizer(1).unwrap();
        assert_eq!(sp1.len(), 6);
        let mut labels = sp1.labels().to_vec();
        labels.sort();
        assert_eq!(labels, ["+X", "+Y", "+Z", "-X", "-Y", "-Z"]);
        assert_eq!(VertexSet::stabilizer(2).unwrap().len(), 60);
        let sp2 = VertexSet::stabilizer(2).unwrap();
        assert!(sp2.position("+XX,+ZZ").is_some());
        assert!(sp2.position("+ZI,+IZ").is_some());
        for op in sp2.operators().unwrap() {
            assert!(validate_state(&op, 1e-12).unwrap().passed());
            assert!(op.matmul(&op).unwrap().approx_eq(&op, 1e-12));
        }
        let lp2 = VertexSet::local_stabilizer(2).unwrap();
        assert_eq!(lp2.len(), 36);
        assert!(lp2.labels().iter().all(|l| sp2.position(l).is_some()));
        assert!(VertexSet::local_stabilizer(1).unwrap().same_vectors(&sp1, 0.0));
    }

    #[test]
    fn vertex_set_invariants() {
        let v = CoeffVector::new(1, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(VertexSet::new(1, vec![("a".into(), v.clone()), ("b".into(), v.clone())]).is_err());
        assert!(VertexSet::new(1, vec![("a".into(), v.scaled(2.0))]).is_err());
        assert!(VertexSet::new(2, vec![("a".into(), v)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let sp1 = VertexSet::stabilizer(1).unwrap();
        let s = serde_json::to_string(&sp1).unwrap();
        assert!(s.starts_with(r#"{"n":1,"vertices":[{"label":"+Z","coeffs":[0.5,0.0,0.0,0.5]}"#));
        assert_eq!(serde_json::from_str::<VertexSet>(&s).unwrap(), sp1);
        assert!(serde_json::from_str::<VertexSet>(r#"{"n":1,"vertices":[{"label":"x","coeffs":[1,0,0,0]}]}"#).is_err());
    }

    #[test]
    fn cnc_set_matches_cube() {
        let cube = VertexSet::cnc(1).unwrap();
        assert_eq!(cube.len(), 8);
        for v in cube.vectors() {
            assert!(v.coeffs().iter().all(|c| (c.abs() - 0.5).abs() < 1e-15));
        }
    }
}
