//! Gottesman-Knill stabilizer simulation with destabilizer rows.
//!
//! The tableau holds `2n` bit-packed rows: rows `0..n` are destabilizers and
//! rows `n..2n` are the stabilizer generators `(-1)^{r_i} T_{a_i}` of the
//! isotropic subspace `I` with value assignment `gamma(a_i) = r_i`. Gates
//! update every row in `O(n)` word operations. Measurement outcomes in the
//! deterministic case come from the destabilizer inner-product method, so no
//! Gaussian elimination is needed on the hot path.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::{Rng, RngCore};

use crate::oracle::{check_dense_size, pauli_projector, DenseOperator};
use crate::pauli::{omega_words, product_exponent, words_for, CliffordGate, PauliIndex, PhasedPauli};
use crate::{Error, Result};

/// Result of a single Pauli measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub outcome: bool,
    pub deterministic: bool,
    /// 1 for deterministic outcomes, 1/2 otherwise.
    pub probability: f64,
}

/// How a random measurement outcome is chosen.
pub enum MeasureMode<'a> {
    Random(&'a mut dyn RngCore),
    /// Forces the outcome; fails if it has probability zero.
    Forced(bool),
}

#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Phase exponent mod 4 per row; always 0 or 2 on stabilizer rows.
    phase: Vec<u8>,
}

impl StabilizerTableau {
    /// `|0...0>`: destabilizers `X_i`, stabilizers `+Z_i`.
    pub fn init_zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("tableau needs at least one qubit".into()));
        }
        let words = words_for(n);
        let mut t = Self { n, words, x: vec![0; 2 * n * words], z: vec![0; 2 * n * words], phase: vec![0; 2 * n] };
        for i in 0..n {
            t.x[i * words + i / 64] |= 1 << (i % 64);
            t.z[(n + i) * words + i / 64] |= 1 << (i % 64);
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn row_x(&self, r: usize) -> &[u64] {
        &self.x[r * self.words..(r + 1) * self.words]
    }

    fn row_z(&self, r: usize) -> &[u64] {
        &self.z[r * self.words..(r + 1) * self.words]
    }

    fn row(&self, r: usize) -> PhasedPauli {
        PhasedPauli::new(self.phase[r], PauliIndex::from_words(self.n, self.row_x(r).to_vec(), self.row_z(r).to_vec()))
    }

    pub fn destabilizer(&self, i: usize) -> PhasedPauli {
        self.row(i)
    }

    pub fn stabilizer(&self, i: usize) -> PhasedPauli {
        self.row(self.n + i)
    }

    pub fn stabilizers(&self) -> Vec<PhasedPauli> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PhasedPauli> {
        (0..self.n).map(|i| self.destabilizer(i)).collect()
    }

    pub fn stabilizer_strings(&self) -> Vec<String> {
        self.stabilizers().iter().map(ToString::to_string).collect()
    }

    /// Conjugates every row by the gate.
    pub fn apply_gate(&mut self, gate: CliffordGate) -> Result<()> {
        gate.check(self.n)?;
        let w = self.words;
        let bit = |q: usize| (q / 64, 1u64 << (q % 64));
        match gate {
            CliffordGate::H(q) => {
                let (k, m) = bit(q);
                for r in 0..2 * self.n {
                    let (xi, zi) = (r * w + k, r * w + k);
                    let (xb, zb) = (self.x[xi] & m, self.z[zi] & m);
                    if xb != 0 && zb != 0 {
                        self.phase[r] ^= 2;
                    }
                    self.x[xi] = (self.x[xi] & !m) | zb;
                    self.z[zi] = (self.z[zi] & !m) | xb;
                }
            }
            CliffordGate::S(q) => {
                let (k, m) = bit(q);
                for r in 0..2 * self.n {
                    let i = r * w + k;
                    let (xb, zb) = (self.x[i] & m, self.z[i] & m);
                    if xb != 0 && zb != 0 {
                        self.phase[r] ^= 2;
                    }
                    self.z[i] ^= xb;
                }
            }
            CliffordGate::X(q) => self.flip_where(q, |_, zb| zb),
            CliffordGate::Z(q) => self.flip_where(q, |xb, _| xb),
            CliffordGate::Y(q) => self.flip_where(q, |xb, zb| xb ^ zb),
            CliffordGate::Cnot(c, t) => {
                let (kc, mc) = bit(c);
                let (kt, mt) = bit(t);
                for r in 0..2 * self.n {
                    let (ic, it) = (r * w + kc, r * w + kt);
                    let xc = self.x[ic] & mc != 0;
                    let zc = self.z[ic] & mc != 0;
                    let xt = self.x[it] & mt != 0;
                    let zt = self.z[it] & mt != 0;
                    if xc && zt && !(xt ^ zc) {
                        self.phase[r] ^= 2;
                    }
                    if xc {
                        self.x[it] ^= mt;
                    }
                    if zt {
                        self.z[ic] ^= mc;
                    }
                }
            }
            CliffordGate::Cz(a, b) => {
                let (ka, ma) = bit(a);
                let (kb, mb) = bit(b);
                for r in 0..2 * self.n {
                    let (ia, ib) = (r * w + ka, r * w + kb);
                    let xa = self.x[ia] & ma != 0;
                    let za = self.z[ia] & ma != 0;
                    let xb = self.x[ib] & mb != 0;
                    let zb = self.z[ib] & mb != 0;
                    if xa && xb && (za ^ zb) {
                        self.phase[r] ^= 2;
                    }
                    if xb {
                        self.z[ia] ^= ma;
                    }
                    if xa {
                        self.z[ib] ^= mb;
                    }
                }
            }
        }
        Ok(())
    }

    fn flip_where(&mut self, q: usize, pred: impl Fn(bool, bool) -> bool) {
        let (k, m) = (q / 64, 1u64 << (q % 64));
        for r in 0..2 * self.n {
            let i = r * self.words + k;
            if pred(self.x[i] & m != 0, self.z[i] & m != 0) {
                self.phase[r] ^= 2;
            }
        }
    }

    fn anticommutes(&self, r: usize, b: &PauliIndex) -> bool {
        omega_words(self.row_x(r), self.row_z(r), b.x_words(), b.z_words())
    }

    /// Replaces row `h` by `row_i * row_h`, keeping the phase mod 4.
    fn rowsum(&mut self, h: usize, i: usize) {
        let w = self.words;
        let e = product_exponent(self.row_x(i), self.row_z(i), self.row_x(h), self.row_z(h));
        self.phase[h] = (self.phase[h] + self.phase[i] + e) % 4;
        for k in 0..w {
            self.x[h * w + k] ^= self.x[i * w + k];
            self.z[h * w + k] ^= self.z[i * w + k];
        }
    }

    fn check_measured(&self, b: &PauliIndex) -> Result<()> {
        if b.n() != self.n {
            return Err(Error::SizeMismatch { left: b.n(), right: self.n });
        }
        if b.is_identity() {
            return Err(Error::Precondition("cannot measure the identity".into()));
        }
        Ok(())
    }

    /// Sign bit `gamma(b)` if `+-T_b` is in the stabilizer group, else
    /// `None`. Uses the destabilizer inner products.
    pub fn stabilizer_sign(&self, b: &PauliIndex) -> Result<Option<bool>> {
        self.check_measured(b)?;
        if (self.n..2 * self.n).any(|r| self.anticommutes(r, b)) {
            return Ok(None);
        }
        let mut acc = PhasedPauli::identity(self.n);
        for i in 0..self.n {
            if self.anticommutes(i, b) {
                acc = acc.multiply(&self.row(self.n + i))?;
            }
        }
        debug_assert_eq!(acc.index(), b);
        acc.sign().map(Some).ok_or_else(|| Error::Precondition("stabilizer product is not Hermitian".into()))
    }

    /// Probability of outcome 0 when measuring `(-1)^sign T_b`, without
    /// changing the state.
    pub fn probability_of_zero(&self, b: &PauliIndex, sign: bool) -> Result<f64> {
        Ok(match self.stabilizer_sign(b)? {
            Some(g) if g ^ sign => 0.0,
            Some(_) => 1.0,
            None => 0.5,
        })
    }

    /// Measures the observable `(-1)^sign T_b`; outcome `s` projects onto
    /// the `(-1)^s` eigenspace.
    pub fn measure(&mut self, b: &PauliIndex, sign: bool, mode: MeasureMode<'_>) -> Result<MeasurementOutcome> {
        self.check_measured(b)?;
        let n = self.n;
        let Some(pivot) = (0..n).find(|&i| self.anticommutes(n + i, b)) else {
            let gamma = self.stabilizer_sign(b)?.expect("b commutes with every stabilizer");
            let outcome = gamma ^ sign;
            if let MeasureMode::Forced(forced) = mode {
                if forced != outcome {
                    return Err(Error::Precondition("forced outcome has probability zero".into()));
                }
            }
            return Ok(MeasurementOutcome { outcome, deterministic: true, probability: 1.0 });
        };
        let outcome = match mode {
            MeasureMode::Random(rng) => rng.random::<bool>(),
            MeasureMode::Forced(s) => s,
        };
        let p = n + pivot;
        for r in 0..2 * n {
            if r != p && r != pivot && self.anticommutes(r, b) {
                self.rowsum(r, p);
            }
        }
        for r in 0..n {
            // destabilizer products with the pivot may pick up a factor of i
            self.phase[r] &= 2;
        }
        let w = self.words;
        self.x.copy_within(p * w..(p + 1) * w, pivot * w);
        self.z.copy_within(p * w..(p + 1) * w, pivot * w);
        self.phase[pivot] = self.phase[p];
        self.x[p * w..(p + 1) * w].copy_from_slice(b.x_words());
        self.z[p * w..(p + 1) * w].copy_from_slice(b.z_words());
        self.phase[p] = if outcome ^ sign { 2 } else { 0 };
        Ok(MeasurementOutcome { outcome, deterministic: false, probability: 0.5 })
    }

    /// Membership of `b` in the stabilizer group by Gaussian elimination over
    /// `Z_2`, independent of the destabilizers. Returns the sign of the
    /// matching group element.
    pub fn gaussian_membership(&self, b: &PauliIndex) -> Result<Option<bool>> {
        if b.n() != self.n {
            return Err(Error::SizeMismatch { left: b.n(), right: self.n });
        }
        let n = self.n;
        // rows: stabilizer bits | combination bits
        let mut rows: Vec<(Vec<bool>, Vec<bool>)> = (0..n)
            .map(|i| {
                let s = self.stabilizer(i);
                let bits = (0..n).map(|q| s.index().xbit(q)).chain((0..n).map(|q| s.index().zbit(q))).collect();
                let mut comb = vec![false; n];
                comb[i] = true;
                (bits, comb)
            })
            .collect();
        let mut target: Vec<bool> = (0..n).map(|q| b.xbit(q)).chain((0..n).map(|q| b.zbit(q))).collect();
        let mut used = vec![false; n];
        let mut combo = vec![false; n];
        for col in 0..2 * n {
            let Some(piv) = (0..n).find(|&r| !used[r] && rows[r].0[col]) else { continue };
            used[piv] = true;
            let pivot_row = rows[piv].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != piv && row.0[col] {
                    xor_into(&mut row.0, &pivot_row.0);
                    xor_into(&mut row.1, &pivot_row.1);
                }
            }
            if target[col] {
                xor_into(&mut target, &pivot_row.0);
                xor_into(&mut combo, &pivot_row.1);
            }
        }
        if target.iter().any(|&t| t) {
            return Ok(None);
        }
        let mut acc = PhasedPauli::identity(n);
        for (i, &c) in combo.iter().enumerate() {
            if c {
                acc = acc.multiply(&self.stabilizer(i))?;
            }
        }
        Ok(acc.sign())
    }

    /// Dense projector `prod_i (1 + (-1)^{r_i} T_{a_i}) / 2`.
    pub fn to_state(&self) -> Result<DenseOperator> {
        check_dense_size(self.n, "dense stabilizer state")?;
        let dim = 1usize << self.n;
        let mut acc = DenseOperator::identity(dim);
        for s in self.stabilizers() {
            let sign = s.sign().expect("stabilizer rows are Hermitian");
            let p = PhasedPauli::signed(false, s.into_index()).materialize()?;
            acc = acc.matmul(&pauli_projector(&p, sign))?;
        }
        Ok(acc)
    }

    /// Checks the tableau invariants: Hermitian stabilizer rows, pairwise
    /// commuting stabilizers, the destabilizer pairing and full rank.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let fail = |msg: String| Err(Error::Precondition(msg));
        for i in 0..n {
            if !self.phase[n + i].is_multiple_of(2) {
                return fail(format!("stabilizer {i} is not Hermitian"));
            }
            for j in 0..n {
                let sd = omega_words(self.row_x(n + i), self.row_z(n + i), self.row_x(j), self.row_z(j));
                if sd != (i == j) {
                    return fail(format!("destabilizer {j} pairing with stabilizer {i} broken"));
                }
                let ss = omega_words(self.row_x(n + i), self.row_z(n + i), self.row_x(n + j), self.row_z(n + j));
                if ss {
                    return fail(format!("stabilizers {i} and {j} anticommute"));
                }
            }
        }
        if self.rank() != 2 * n {
            return fail("rows are not linearly independent".into());
        }
        Ok(())
    }

    fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> =
            (0..2 * self.n).map(|r| self.row_x(r).iter().chain(self.row_z(r)).copied().collect()).collect();
        let mut rank = 0;
        for col in 0..2 * self.words * 64 {
            let (k, m) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][k] & m != 0) else { continue };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[k] & m != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Every element `(code, sign)` of the stabilizer group, sorted; a
    /// canonical key for the state. Exponential in `n`.
    pub fn group_key(&self) -> Vec<(usize, bool)> {
        let gens = self.stabilizers();
        let mut out: Vec<(usize, bool)> = (0..1usize << self.n)
            .map(|mask| {
                let mut acc = PhasedPauli::identity(self.n);
                for (i, g) in gens.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        acc = acc.multiply(g).expect("same size");
                    }
                }
                (acc.index().code(), acc.sign().expect("commuting product is Hermitian"))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Text dump: one `D`/`S` tagged signed Pauli string per line.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

fn xor_into(dst: &mut [bool], src: &[bool]) {
    dst.iter_mut().zip(src).for_each(|(a, b)| *a ^= b);
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..2 * self.n {
            let tag = if r < self.n { 'D' } else { 'S' };
            let row = self.row(r);
            let sign = if row.phase() >= 2 { '-' } else { '+' };
            writeln!(f, "{tag} {sign}{}", row.index())?;
        }
        Ok(())
    }
}

impl fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilizerTableau(n={})\n{self}", self.n)
    }
}

/// Every `n`-qubit stabilizer state, each once, by breadth-first search
/// over `H`, `S` and `CNOT` from `|0...0>`.
pub fn enumerate_stabilizer_states(n: usize) -> Result<Vec<StabilizerTableau>> {
    if n == 0 || n > 3 {
        return Err(Error::TooLarge { what: "stabilizer state enumeration (1..=3)", n });
    }
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(CliffordGate::H(q));
        gates.push(CliffordGate::S(q));
        for t in 0..n {
            if t != q {
                gates.push(CliffordGate::Cnot(q, t));
            }
        }
    }
    let start = StabilizerTableau::init_zero(n)?;
    let mut seen = HashSet::from([start.group_key()]);
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for &g in &gates {
            let mut next = t.clone();
            next.apply_gate(g)?;
            if seen.insert(next.group_key()) {
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(out)
}
