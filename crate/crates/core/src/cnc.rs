//! Closed non-contextual (CNC) sets and operators.
//!
//! A set `Omega` of Pauli indices is closed when every commuting pair in it
//! has its sum in it, and non-contextual when it admits a value assignment
//! `gamma(a + b) = gamma(a) + gamma(b) + beta(a, b)` on commuting pairs. Such
//! a pair `(Omega, gamma)` labels the operator
//! `A = 2^{-n} sum_{a in Omega} (-1)^{gamma(a)} T_a`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::CoeffVector;
use crate::oracle::DenseOperator;
use crate::pauli::{beta_unchecked, omega as symplectic, PauliIndex, ValueAssignment};
use crate::{Error, Result};

/// Most free variables `value_assignments` will enumerate.
const MAX_FREE: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    Closed,
    /// A commuting pair whose sum is missing.
    Violation(PauliIndex, PauliIndex),
}

impl Closure {
    pub fn is_closed(&self) -> bool {
        matches!(self, Closure::Closed)
    }
}

fn check_members(omega: &[PauliIndex]) -> Result<usize> {
    let n = omega.first().map(PauliIndex::n).ok_or_else(|| Error::Precondition("empty set".into()))?;
    if let Some(bad) = omega.iter().find(|a| a.n() != n) {
        return Err(Error::SizeMismatch { left: n, right: bad.n() });
    }
    if !omega.iter().any(PauliIndex::is_identity) {
        return Err(Error::Precondition("set must contain the zero index".into()));
    }
    Ok(n)
}

fn sort_lexicographic(v: &mut [PauliIndex]) {
    v.sort_by_cached_key(ToString::to_string);
}

/// Closure test: `a, b in Omega`, `omega(a, b) = 0` implies `a + b in Omega`.
pub fn is_closed(omega: &[PauliIndex]) -> Result<Closure> {
    check_members(omega)?;
    let set: HashSet<&PauliIndex> = omega.iter().collect();
    for (i, a) in omega.iter().enumerate() {
        for b in &omega[i + 1..] {
            if !symplectic(a, b)? && !set.contains(&a.add(b)?) {
                return Ok(Closure::Violation(a.clone(), b.clone()));
            }
        }
    }
    Ok(Closure::Closed)
}

/// All value assignments on a closed set, each aligned with `omega`.
///
/// Empty iff `omega` is contextual.
pub fn value_assignments(omega: &[PauliIndex]) -> Result<Vec<ValueAssignment>> {
    if let Closure::Violation(a, b) = is_closed(omega)? {
        return Err(Error::Precondition(format!("set is not closed: {a} + {b} missing")));
    }
    let mut domain: Vec<PauliIndex> = omega.to_vec();
    sort_lexicographic(&mut domain);
    domain.dedup();
    let unknowns: Vec<&PauliIndex> = domain.iter().filter(|a| !a.is_identity()).collect();
    let pos: HashMap<&PauliIndex, usize> = unknowns.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let k = unknowns.len();
    let mut system = Gf2System::new(k);
    for (i, a) in unknowns.iter().enumerate() {
        for b in &unknowns[i + 1..] {
            if symplectic(a, b)? {
                continue;
            }
            let sum = a.add(b)?;
            let mut row = vec![false; k];
            row[i] = true;
            row[pos[b]] = true;
            row[pos[&sum]] ^= true;
            system.push(row, beta_unchecked(a, b));
        }
    }
    let solutions = system.solve_all()?;
    Ok(solutions
        .into_iter()
        .map(|sol| {
            let values = domain.iter().map(|a| if a.is_identity() { false } else { sol[pos[a]] }).collect();
            ValueAssignment { domain: domain.clone(), values }
        })
        .collect())
}

/// Affine system over `Z_2`.
struct Gf2System {
    vars: usize,
    rows: Vec<(Vec<bool>, bool)>,
}

impl Gf2System {
    fn new(vars: usize) -> Self {
        Self { vars, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<bool>, rhs: bool) {
        self.rows.push((row, rhs));
    }

    fn solve_all(mut self) -> Result<Vec<Vec<bool>>> {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.vars {
            let Some(p) = (rank..self.rows.len()).find(|&r| self.rows[r].0[col]) else { continue };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != rank && row.0[col] {
                    row.0.iter_mut().zip(&pivot.0).for_each(|(a, b)| *a ^= b);
                    row.1 ^= pivot.1;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        if self.rows[rank..].iter().any(|(_, rhs)| *rhs) {
            return Ok(Vec::new());
        }
        let free: Vec<usize> = (0..self.vars).filter(|c| !pivots.contains(c)).collect();
        if free.len() > MAX_FREE {
            return Err(Error::TooLarge { what: "value assignment enumeration", n: free.len() });
        }
        let mut out = Vec::with_capacity(1 << free.len());
        for mask in 0..1usize << free.len() {
            let mut sol = vec![false; self.vars];
            for (i, &f) in free.iter().enumerate() {
                sol[f] = mask >> i & 1 == 1;
            }
            for (r, &pc) in pivots.iter().enumerate() {
                let (row, rhs) = &self.rows[r];
                let v = free.iter().fold(*rhs, |acc, &f| acc ^ (row[f] & sol[f]));
                sol[pc] = v;
            }
            out.push(sol);
        }
        Ok(out)
    }
}

/// A CNC set with one of its value assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CncLabel {
    omega: Vec<PauliIndex>,
    gamma: Vec<bool>,
}

impl CncLabel {
    /// Validates closure and the value-assignment equations.
    pub fn new(omega: Vec<PauliIndex>, gamma: Vec<bool>) -> Result<Self> {
        if omega.len() != gamma.len() {
            return Err(Error::InvalidInput("omega and gamma differ in length".into()));
        }
        let mut pairs: Vec<(PauliIndex, bool)> = omega.into_iter().zip(gamma).collect();
        pairs.sort_by_cached_key(|p| p.0.to_string());
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (omega, gamma): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let label = Self { omega, gamma };
        label.validate()?;
        Ok(label)
    }

    /// Re-checks both CNC conditions from scratch.
    pub fn validate(&self) -> Result<()> {
        if let Closure::Violation(a, b) = is_closed(&self.omega)? {
            return Err(Error::Precondition(format!("set is not closed: {a} + {b} missing")));
        }
        let lookup: HashMap<&PauliIndex, bool> = self.omega.iter().zip(self.gamma.iter().copied()).collect();
        for (a, &g) in &lookup {
            if a.is_identity() && g {
                return Err(Error::Precondition("gamma(0) must be 0".into()));
            }
        }
        for a in &self.omega {
            for b in &self.omega {
                if symplectic(a, b)? {
                    continue;
                }
                let lhs = lookup[&a.add(b)?];
                if lhs != lookup[a] ^ lookup[b] ^ beta_unchecked(a, b) {
                    return Err(Error::Precondition(format!("value assignment fails on ({a}, {b})")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.omega[0].n()
    }

    pub fn omega(&self) -> &[PauliIndex] {
        &self.omega
    }

    pub fn gamma(&self) -> &[bool] {
        &self.gamma
    }

    pub fn assignment(&self) -> ValueAssignment {
        ValueAssignment { domain: self.omega.clone(), values: self.gamma.clone() }
    }

    /// `A = 2^{-n} sum_{a in Omega} (-1)^{gamma(a)} T_a` as Pauli coefficients.
    pub fn coefficients(&self) -> Result<CoeffVector> {
        let n = self.n();
        if n > 4 {
            return Err(Error::TooLarge { what: "CNC operator", n });
        }
        let mut coeffs = vec![0.0; 1 << (2 * n)];
        let w = 0.5f64.powi(n as i32);
        for (a, &g) in self.omega.iter().zip(&self.gamma) {
            coeffs[a.code()] = if g { -w } else { w };
        }
        CoeffVector::new(n, coeffs)
    }

    /// Dense form of the CNC operator.
    pub fn operator(&self) -> Result<DenseOperator> {
        self.coefficients()?.to_operator()
    }

    /// Compact text form listing the signed non-identity elements.
    pub fn signed_elements(&self) -> String {
        let parts: Vec<String> = self
            .omega
            .iter()
            .zip(&self.gamma)
            .filter(|(a, _)| !a.is_identity())
            .map(|(a, &g)| format!("{}{a}", if g { '-' } else { '+' }))
            .collect();
        parts.join(",")
    }
}

impl fmt::Display for CncLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cnc[{}]", self.signed_elements())
    }
}

#[derive(Serialize, Deserialize)]
struct CncJson {
    omega: Vec<String>,
    gamma: Vec<u8>,
}

impl Serialize for CncLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CncJson {
            omega: self.omega.iter().map(ToString::to_string).collect(),
            gamma: self.gamma.iter().map(|&g| g as u8).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CncLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CncJson::deserialize(d)?;
        let omega =
            raw.omega.iter().map(|s| PauliIndex::parse(s)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        CncLabel::new(omega, raw.gamma.iter().map(|&g| g != 0).collect()).map_err(D::Error::custom)
    }
}

/// Bitmask over index codes; `n <= 2` keeps every set within 16 bits.
type Mask = u64;

fn mask_members(n: usize, m: Mask) -> Vec<PauliIndex> {
    (0..1usize << (2 * n)).filter(|c| m >> c & 1 == 1).map(|c| PauliIndex::from_code(n, c)).collect()
}

fn closure_mask(n: usize, mut m: Mask) -> Mask {
    let size = 1usize << (2 * n);
    let points: Vec<PauliIndex> = (0..size).map(|c| PauliIndex::from_code(n, c)).collect();
    loop {
        let mut grown = m;
        for a in 0..size {
            if m >> a & 1 == 0 {
                continue;
            }
            for b in a + 1..size {
                if m >> b & 1 == 1 && !symplectic(&points[a], &points[b]).expect("same n") {
                    grown |= 1 << points[a].add_unchecked(&points[b]).code();
                }
            }
        }
        if grown == m {
            return m;
        }
        m = grown;
    }
}

fn is_noncontextual(n: usize, m: Mask) -> Result<bool> {
    Ok(!value_assignments(&mask_members(n, m))?.is_empty())
}

/// Every maximal CNC set (under inclusion) together with each of its value
/// assignments.
///
/// Sets are grown by closure-completion from `{0}` one element at a time;
/// a CNC set is maximal when no single-element extension stays CNC.
pub fn enumerate_maximal_cnc(n: usize) -> Result<Vec<CncLabel>> {
    if n == 0 || n > 2 {
        return Err(Error::TooLarge { what: "maximal CNC enumeration (1..=2)", n });
    }
    let size = 1usize << (2 * n);
    let start: Mask = 1;
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut maximal = Vec::new();
    while let Some(m) = queue.pop_front() {
        let mut extendable = false;
        for e in 1..size {
            if m >> e & 1 == 1 {
                continue;
            }
            let grown = closure_mask(n, m | 1 << e);
            if !is_noncontextual(n, grown)? {
                continue;
            }
            extendable = true;
            if seen.insert(grown) {
                queue.push_back(grown);
            }
        }
        if !extendable {
            maximal.push(m);
        }
    }
    maximal.sort_unstable();
    let mut labels = Vec::new();
    for m in maximal {
        let omega = mask_members(n, m);
        for va in value_assignments(&omega)? {
            labels.push(CncLabel::new(va.domain, va.values)?);
        }
    }
    Ok(labels)
}
