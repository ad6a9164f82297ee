//! Dense complex-matrix reference engine.
//!
//! Everything here works on explicit `2^n x 2^n` matrices and is only meant
//! for small qubit counts (`n <= 6`). Operators, channels and instruments
//! (as Kraus collections) live here, along with Born probabilities, partial
//! traces and state validation. The other modules are tested against it.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest qubit count the dense engine will materialize.
pub const MAX_DENSE_QUBITS: usize = 6;

/// Default entrywise tolerance for dense comparisons.
pub const TOL: f64 = 1e-9;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// A dense complex matrix stored row-major.
///
/// Square operators on `n` qubits have `rows == cols == 2^n`; Kraus factors
/// of destructive or preparation instruments are rectangular.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C0; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C1;
        }
        m
    }

    /// The 1x1 operator `1` on the scalar Hilbert space.
    pub fn scalar(value: f64) -> Self {
        Self { rows: 1, cols: 1, data: vec![Complex64::new(value, 0.0)] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.concat() })
    }

    /// Projector `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn ket_bra(psi: &[Complex64]) -> Self {
        Self::from_fn(psi.len(), psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    /// Column vector (a `dim x 1` matrix).
    pub fn column(psi: &[Complex64]) -> Self {
        Self { rows: psi.len(), cols: 1, data: psi.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Qubit count of a square power-of-two operator.
    pub fn qubits(&self) -> Option<usize> {
        (self.is_square() && self.rows.is_power_of_two()).then(|| self.rows.trailing_zeros() as usize)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn add_assign_scaled(&mut self, other: &Self, scale: Complex64) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
        Ok(())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `U A U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }

    /// Partial trace over one qubit; qubit 0 is the leftmost tensor factor.
    pub fn partial_trace(&self, qubit: usize) -> Result<Self> {
        let n = self.qubits().ok_or_else(|| Error::Dimension("partial trace needs a square 2^n operator".into()))?;
        if n < 1 {
            return Err(Error::Precondition("partial trace needs at least one qubit".into()));
        }
        if qubit >= n {
            return Err(Error::QubitOutOfRange { qubit, n });
        }
        let shift = n - 1 - qubit;
        let low_mask = (1usize << shift) - 1;
        let expand = |i: usize, bit: usize| ((i & !low_mask) << 1) | (bit << shift) | (i & low_mask);
        let dim = 1usize << (n - 1);
        Ok(Self::from_fn(dim, dim, |r, c| self[(expand(r, 0), expand(c, 0))] + self[(expand(r, 1), expand(c, 1))]))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Cyclic Jacobi rotations on the real symmetric embedding
    /// `[[Re, -Im], [Im, Re]]`, whose spectrum is the Hermitian spectrum with
    /// every eigenvalue doubled.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(TOL) {
            return Err(Error::Precondition("matrix is not Hermitian".into()));
        }
        let d = self.rows;
        let m = 2 * d;
        let mut a = vec![0.0; m * m];
        for r in 0..d {
            for c in 0..d {
                let z = self[(r, c)];
                a[r * m + c] = z.re;
                a[(r + d) * m + c + d] = z.re;
                a[r * m + c + d] = -z.im;
                a[(r + d) * m + c] = z.im;
            }
        }
        jacobi_eigenvalues(&mut a, m, 100);
        let mut eig: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
        eig.sort_by(f64::total_cmp);
        Ok(eig.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
    }

    /// Vectors `v_k` with `self = sum_k v_k v_k^dagger`, by pivoted Cholesky.
    ///
    /// `self` must be positive semidefinite; directions with residual
    /// diagonal weight below `tol` are dropped.
    pub fn psd_factor(&self, tol: f64) -> Result<Vec<Vec<Complex64>>> {
        if !self.is_hermitian(tol) {
            return Err(Error::Precondition("matrix is not Hermitian".into()));
        }
        let d = self.rows;
        let mut work = self.clone();
        let mut out = Vec::new();
        for _ in 0..d {
            let (k, pivot) = (0..d).map(|i| (i, work[(i, i)].re)).max_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
            if pivot <= tol {
                break;
            }
            let norm = pivot.sqrt();
            let v: Vec<Complex64> = (0..d).map(|i| work[(i, k)] / norm).collect();
            for r in 0..d {
                for c in 0..d {
                    let delta = v[r] * v[c].conj();
                    work[(r, c)] -= delta;
                }
            }
            out.push(v);
        }
        Ok(out)
    }
}

fn jacobi_eigenvalues(a: &mut [f64], m: usize, max_sweeps: usize) {
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _ in 0..max_sweeps {
        let off: f64 = (0..m)
            .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * m + q] * a[p * m + q])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            return;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseOperator {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

#[derive(Serialize, Deserialize)]
struct DenseJson {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for DenseOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.qubits().ok_or_else(|| serde::ser::Error::custom("only square 2^n operators serialize"))?;
        let rows = |f: fn(&Complex64) -> f64| {
            (0..self.rows).map(|r| (0..self.cols).map(|c| f(&self[(r, c)])).collect()).collect()
        };
        DenseJson { n, re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DenseJson::deserialize(d)?;
        let dim = 1usize << raw.n;
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
        if !shape_ok(&raw.re) || !shape_ok(&raw.im) {
            return Err(D::Error::custom(format!("expected {dim}x{dim} re/im arrays")));
        }
        Ok(Self::from_fn(dim, dim, |r, c| Complex64::new(raw.re[r][c], raw.im[r][c])))
    }
}

/// Outcome of [`validate_state`].
#[derive(Clone, Debug, PartialEq)]
pub enum StateCheck {
    Pass,
    /// The smallest eigenvalue is below `-tol`.
    NegativeEigenvalue(f64),
    /// The trace is not one.
    WrongTrace(f64),
}

impl StateCheck {
    pub fn passed(&self) -> bool {
        matches!(self, StateCheck::Pass)
    }
}

/// Checks that `a` is a density operator: trace one and positive semidefinite.
pub fn validate_state(a: &DenseOperator, tol: f64) -> Result<StateCheck> {
    if !a.is_hermitian(tol) {
        return Err(Error::Precondition("state is not Hermitian".into()));
    }
    let tr = a.trace().re;
    if (tr - 1.0).abs() > tol {
        return Ok(StateCheck::WrongTrace(tr));
    }
    let eig = a.hermitian_eigenvalues()?;
    match eig.first() {
        Some(&lo) if lo < -tol => Ok(StateCheck::NegativeEigenvalue(lo)),
        _ => Ok(StateCheck::Pass),
    }
}

/// An instrument with a classical input: for every input `a` and outcome `s`
/// a completely positive map given by a list of Kraus factors.
///
/// A missing Kraus list (empty) is the zero map.
#[derive(Clone, Debug)]
pub struct DenseInstrument {
    inputs: Vec<String>,
    outcomes: Vec<String>,
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<Vec<Vec<DenseOperator>>>,
}

impl DenseInstrument {
    /// Builds an instrument from `kraus[a][s]` lists; every factor must be
    /// `out_dim x in_dim`.
    pub fn new(
        inputs: Vec<String>,
        outcomes: Vec<String>,
        in_dim: usize,
        out_dim: usize,
        kraus: Vec<Vec<Vec<DenseOperator>>>,
    ) -> Result<Self> {
        if kraus.len() != inputs.len() || kraus.iter().any(|row| row.len() != outcomes.len()) {
            return Err(Error::Dimension("Kraus table does not match label sets".into()));
        }
        let bad = kraus.iter().flatten().flatten().any(|k| k.rows() != out_dim || k.cols() != in_dim);
        if bad {
            return Err(Error::Dimension(format!("Kraus factors must be {out_dim}x{in_dim}")));
        }
        Ok(Self { inputs, outcomes, in_dim, out_dim, kraus })
    }

    /// Channel `A -> sum_k K_k A K_k^dagger` with trivial classical sets.
    pub fn channel(in_dim: usize, out_dim: usize, kraus: Vec<DenseOperator>) -> Result<Self> {
        Self::new(vec!["*".into()], vec!["*".into()], in_dim, out_dim, vec![vec![kraus]])
    }

    pub fn identity(dim: usize) -> Self {
        Self::channel(dim, dim, vec![DenseOperator::identity(dim)]).expect("identity is well formed")
    }

    pub fn unitary(u: DenseOperator) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::Dimension("unitary must be square".into()));
        }
        let d = u.rows();
        Self::channel(d, d, vec![u])
    }

    /// Preparation `alpha -> alpha * rho` from the scalars.
    pub fn preparation(rho: &DenseOperator) -> Result<Self> {
        let kraus = rho.psd_factor(1e-12)?.iter().map(|v| DenseOperator::column(v)).collect();
        Self::channel(1, rho.rows(), kraus)
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self, a: usize, s: usize) -> &[DenseOperator] {
        &self.kraus[a][s]
    }

    pub fn with_labels(mut self, inputs: Vec<String>, outcomes: Vec<String>) -> Result<Self> {
        if inputs.len() != self.inputs.len() || outcomes.len() != self.outcomes.len() {
            return Err(Error::Dimension("relabeling must keep set sizes".into()));
        }
        self.inputs = inputs;
        self.outcomes = outcomes;
        Ok(self)
    }

    /// Maximum deviation of `sum_s sum_K K^dagger K` from the identity over
    /// all inputs.
    pub fn normalization_error(&self) -> f64 {
        let id = DenseOperator::identity(self.in_dim);
        self.kraus
            .iter()
            .map(|row| {
                let mut acc = DenseOperator::zeros(self.in_dim, self.in_dim);
                for k in row.iter().flatten() {
                    let kk = k.adjoint().matmul(k).expect("shapes checked");
                    acc.add_assign_scaled(&kk, C1).expect("shapes checked");
                }
                acc.max_abs_diff(&id)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.normalization_error() <= tol
    }
}

/// `sum_K K A K^dagger` for the branch `(a, s)` of an instrument.
pub fn apply_cp(instr: &DenseInstrument, a: usize, s: usize, op: &DenseOperator) -> Result<DenseOperator> {
    if a >= instr.inputs.len() || s >= instr.outcomes.len() {
        return Err(Error::InvalidInput(format!("unknown instrument labels ({a}, {s})")));
    }
    if op.rows() != instr.in_dim || op.cols() != instr.in_dim {
        return Err(Error::Dimension(format!(
            "instrument acts on dimension {}, operator is {}x{}",
            instr.in_dim,
            op.rows(),
            op.cols()
        )));
    }
    let mut out = DenseOperator::zeros(instr.out_dim, instr.out_dim);
    for k in &instr.kraus[a][s] {
        let img = k.matmul(op)?.matmul(&k.adjoint())?;
        out.add_assign_scaled(&img, C1)?;
    }
    Ok(out)
}

/// Projector `(1 + (-1)^s P) / 2` for a Hermitian Pauli matrix `P`.
pub fn pauli_projector(p: &DenseOperator, s: bool) -> DenseOperator {
    let sign = if s { -0.5 } else { 0.5 };
    let mut out = p.scale_real(sign);
    for i in 0..out.rows() {
        out[(i, i)] += Complex64::new(0.5, 0.0);
    }
    out
}

/// Two-outcome Pauli measurement instrument with a single trivial input.
///
/// Non-destructive: Kraus `{Pi_b^s}`. Destructive: the projection is
/// followed by a partial trace over `qubit`, so the output loses one qubit
/// and `b` must be supported on `qubit` alone.
pub fn pauli_measurement_instrument(
    b: &crate::pauli::PhasedPauli,
    destructive: bool,
    qubit: Option<usize>,
) -> Result<DenseInstrument> {
    if !b.is_hermitian() {
        return Err(Error::Precondition("measured Pauli must be Hermitian".into()));
    }
    let n = b.index().n();
    let dim = 1usize << n;
    let p = b.materialize()?;
    let outcomes = vec!["0".to_string(), "1".to_string()];
    let projectors = [pauli_projector(&p, false), pauli_projector(&p, true)];
    if !destructive {
        let kraus = projectors.into_iter().map(|pr| vec![pr]).collect();
        return DenseInstrument::new(vec!["*".into()], outcomes, dim, dim, vec![kraus]);
    }
    let q = qubit.ok_or_else(|| Error::Precondition("destructive measurement needs a qubit".into()))?;
    if q >= n {
        return Err(Error::QubitOutOfRange { qubit: q, n });
    }
    let support: Vec<usize> = (0..n).filter(|&i| b.index().xbit(i) || b.index().zbit(i)).collect();
    if support != [q] {
        return Err(Error::Precondition(format!("destructive measurement must be supported on qubit {q} only")));
    }
    let kraus = projectors
        .iter()
        .map(|pr| [false, true].iter().map(|&bit| basis_bra(n, q, bit).matmul(pr)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    DenseInstrument::new(vec!["*".into()], outcomes, dim, dim / 2, vec![kraus])
}

/// `<bit|` on `qubit`, identity elsewhere: a `2^{n-1} x 2^n` matrix.
pub fn basis_bra(n: usize, qubit: usize, bit: bool) -> DenseOperator {
    let shift = n - 1 - qubit;
    let low_mask = (1usize << shift) - 1;
    DenseOperator::from_fn(1 << (n - 1), 1 << n, |r, c| {
        let full = ((r & !low_mask) << 1) | ((bit as usize) << shift) | (r & low_mask);
        if full == c {
            C1
        } else {
            C0
        }
    })
}

/// Born probability `Tr(rho Pi)` (real part).
pub fn born(rho: &DenseOperator, projector: &DenseOperator) -> Result<f64> {
    Ok(rho.matmul(projector)?.trace().re)
}

/// Computational basis state `|bits><bits|`, qubit 0 leftmost.
pub fn basis_state(bits: &[bool]) -> DenseOperator {
    let dim = 1usize << bits.len();
    let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let mut m = DenseOperator::zeros(dim, dim);
    m[(idx, idx)] = C1;
    m
}

pub fn tensor_all(ops: &[DenseOperator]) -> DenseOperator {
    ops.iter().fold(DenseOperator::scalar(1.0), |acc, op| acc.kron(op))
}

/// Label of the paired outcome `(s, r)`; the trivial label `*` is dropped.
pub fn join_labels(s: &str, r: &str) -> String {
    match (s, r) {
        ("*", _) => r.to_string(),
        (_, "*") => s.to_string(),
        _ => format!("{s}{r}"),
    }
}

/// Errors if `n` exceeds [`MAX_DENSE_QUBITS`].
pub fn check_dense_size(n: usize, what: &'static str) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge { what, n });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PhasedPauli;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> DenseOperator {
        DenseOperator::from_fn(2, 2, |_, _| c(0.5, 0.0))
    }

    #[test]
    fn identity_channel_is_noop() {
        let id = DenseInstrument::identity(2);
        let rho = plus();
        assert!(apply_cp(&id, 0, 0, &rho).unwrap().approx_eq(&rho, 1e-15));
    }

    #[test]
    fn z_measurement_on_plus() {
        let z = PhasedPauli::parse("Z").unwrap();
        let m = pauli_measurement_instrument(&z, false, None).unwrap();
        let out = apply_cp(&m, 0, 0, &plus()).unwrap();
        let expected = basis_state(&[false]).scale_real(0.5);
        assert!(out.approx_eq(&expected, 1e-15));
        assert_eq!(m.kraus(0, 0)[0], basis_state(&[false]));
        assert_eq!(m.kraus(0, 1)[0], basis_state(&[true]));
    }

    #[test]
    fn hadamard_channel() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DenseOperator::from_rows(&[vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]).unwrap();
        let u = DenseInstrument::unitary(h).unwrap();
        let out = apply_cp(&u, 0, 0, &basis_state(&[false])).unwrap();
        assert!(out.approx_eq(&plus(), 1e-15));
    }

    #[test]
    fn destructive_x_on_product_state() {
        let x0 = PhasedPauli::parse("XI").unwrap();
        let m = pauli_measurement_instrument(&x0, true, Some(0)).unwrap();
        let rho = DenseOperator::from_rows(&[vec![c(0.7, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.3, 0.0)]]).unwrap();
        let input = basis_state(&[false]).kron(&rho);
        for s in 0..2 {
            let out = apply_cp(&m, 0, s, &input).unwrap();
            assert_eq!(out.rows(), 2);
            assert!(out.approx_eq(&rho.scale_real(0.5), 1e-12));
        }
        assert!(m.is_trace_preserving(1e-12));
    }

    #[test]
    fn destructive_rejects_multi_qubit_support() {
        let zz = PhasedPauli::parse("ZZ").unwrap();
        assert!(pauli_measurement_instrument(&zz, true, Some(0)).is_err());
        let x = PhasedPauli::parse("XI").unwrap();
        assert!(pauli_measurement_instrument(&x, true, None).is_err());
    }

    #[test]
    fn y_measurement_is_complete() {
        let y = PhasedPauli::parse("Y").unwrap();
        let m = pauli_measurement_instrument(&y, false, None).unwrap();
        assert!(m.is_trace_preserving(1e-15));
        let non_herm = PhasedPauli::new(1, crate::pauli::PauliIndex::parse("Y").unwrap());
        assert!(pauli_measurement_instrument(&non_herm, false, None).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let rho = plus();
        let sigma = basis_state(&[true]);
        let pt = rho.kron(&sigma).partial_trace(0).unwrap();
        assert!(pt.approx_eq(&sigma, 1e-15));
        let pt1 = rho.kron(&sigma).partial_trace(1).unwrap();
        assert!(pt1.approx_eq(&rho, 1e-15));

        let h = 0.5;
        let bell = DenseOperator::from_fn(4, 4, |r, c_| {
            if (r == 0 || r == 3) && (c_ == 0 || c_ == 3) {
                c(h, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let reduced = bell.partial_trace(0).unwrap();
        assert!(reduced.approx_eq(&DenseOperator::identity(2).scale_real(0.5), 1e-15));
        assert!(matches!(bell.partial_trace(2), Err(Error::QubitOutOfRange { .. })));
        assert!(DenseOperator::scalar(1.0).partial_trace(0).is_err());
    }

    #[test]
    fn validate_state_examples() {
        assert_eq!(validate_state(&basis_state(&[false]), 1e-9).unwrap(), StateCheck::Pass);

        let r2 = 2f64.sqrt();
        let a = DenseOperator::from_rows(&[vec![c(0.5, 0.0), c(r2 / 2.0, 0.0)], vec![c(r2 / 2.0, 0.0), c(0.5, 0.0)]])
            .unwrap();
        match validate_state(&a, 1e-9).unwrap() {
            StateCheck::NegativeEigenvalue(e) => assert!((e - (1.0 - r2) / 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }

        // (1 + X + Y + Z) / 2
        let cube =
            DenseOperator::from_rows(&[vec![c(1.0, 0.0), c(0.5, -0.5)], vec![c(0.5, 0.5), c(0.0, 0.0)]]).unwrap();
        match validate_state(&cube, 1e-9).unwrap() {
            StateCheck::NegativeEigenvalue(e) => assert!((e - (1.0 - 3f64.sqrt()) / 2.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }

        let not_herm =
            DenseOperator::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(validate_state(&not_herm, 1e-9).is_err());
        assert!(matches!(validate_state(&DenseOperator::identity(2), 1e-9).unwrap(), StateCheck::WrongTrace(_)));
    }

    #[test]
    fn psd_factor_reconstructs() {
        let rho = DenseOperator::from_rows(&[vec![c(0.7, 0.0), c(0.1, 0.2)], vec![c(0.1, -0.2), c(0.3, 0.0)]]).unwrap();
        let vs = rho.psd_factor(1e-14).unwrap();
        let mut acc = DenseOperator::zeros(2, 2);
        for v in &vs {
            acc = acc.add(&DenseOperator::ket_bra(v)).unwrap();
        }
        assert!(acc.approx_eq(&rho, 1e-12));
        let prep = DenseInstrument::preparation(&rho).unwrap();
        let out = apply_cp(&prep, 0, 0, &DenseOperator::scalar(1.0)).unwrap();
        assert!(out.approx_eq(&rho, 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let rho = plus();
        let s = serde_json::to_string(&rho).unwrap();
        assert_eq!(s, r#"{"n":1,"re":[[0.5,0.5],[0.5,0.5]],"im":[[0.0,0.0],[0.0,0.0]]}"#);
        let back: DenseOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rho);
        assert!(serde_json::from_str::<DenseOperator>(r#"{"n":1,"re":[[1]],"im":[[0]]}"#).is_err());
    }

    #[test]
    fn eigenvalues_of_diagonal_and_pauli() {
        let y = PhasedPauli::parse("Y").unwrap().materialize().unwrap();
        let e = y.hermitian_eigenvalues().unwrap();
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    }
}
