//! Binary symplectic representation of the n-qubit Pauli group.
//!
//! A point `a = (a^X | a^Z)` of `E_n = Z_2^{2n}` indexes the Hermitian Pauli
//! operator `T_a = i^{a^X . a^Z} X^{a^X} Z^{a^Z}`, so a qubit with both bits
//! set carries a `Y` factor. Signed and phased operators are `i^t T_a` with
//! `t` kept mod 4. Bits are packed 64 qubits to a word; the symplectic form
//! and the product phase are word-parallel popcounts.

use std::fmt;

use num::complex::Complex64;

use crate::oracle::{check_dense_size, DenseOperator};
use crate::{Error, Result};

const WORD: usize = 64;

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A point of `E_n`: the X and Z bit strings of a Pauli operator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliIndex {
    /// The zero index, i.e. the identity operator.
    pub fn identity(n: usize) -> Self {
        Self { n, x: vec![0; words_for(n)], z: vec![0; words_for(n)] }
    }

    pub fn from_bits(xbits: &[bool], zbits: &[bool]) -> Result<Self> {
        if xbits.len() != zbits.len() {
            return Err(Error::SizeMismatch { left: xbits.len(), right: zbits.len() });
        }
        let mut p = Self::identity(xbits.len());
        for (i, (&xb, &zb)) in xbits.iter().zip(zbits).enumerate() {
            p.set_x(i, xb);
            p.set_z(i, zb);
        }
        Ok(p)
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        Self { n, x, z }
    }

    /// Single-qubit Pauli `letter` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: char) -> Result<Self> {
        if qubit >= n {
            return Err(Error::QubitOutOfRange { qubit, n });
        }
        let (xb, zb) = letter_bits(letter)?;
        let mut p = Self::identity(n);
        p.set_x(qubit, xb);
        p.set_z(qubit, zb);
        Ok(p)
    }

    /// Parses a string over `{I, X, Y, Z}`, qubit 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.chars().collect();
        let mut p = Self::identity(letters.len());
        for (i, &ch) in letters.iter().enumerate() {
            let (xb, zb) = letter_bits(ch)?;
            p.set_x(i, xb);
            p.set_z(i, zb);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn xbit(&self, i: usize) -> bool {
        (self.x[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn zbit(&self, i: usize) -> bool {
        (self.z[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set_x(&mut self, i: usize, v: bool) {
        set_bit(&mut self.x, i, v);
    }

    pub fn set_z(&mut self, i: usize, v: bool) {
        set_bit(&mut self.z, i, v);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Qubits on which the operator acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.xbit(i) || self.zbit(i)).collect()
    }

    /// Group law of `E_n`: bitwise sum mod 2.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_n(self, other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn letter(&self, i: usize) -> char {
        match (self.xbit(i), self.zbit(i)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Position in the coefficient ordering: base-4 digits `I=0, X=1, Y=2,
    /// Z=3`, qubit 0 most significant. Lexicographic order of the letter
    /// strings matches this order.
    pub fn code(&self) -> usize {
        (0..self.n).fold(0, |acc, i| {
            let d = match (self.xbit(i), self.zbit(i)) {
                (false, false) => 0,
                (true, false) => 1,
                (true, true) => 2,
                (false, true) => 3,
            };
            acc * 4 + d
        })
    }

    pub fn from_code(n: usize, code: usize) -> Self {
        let mut p = Self::identity(n);
        let mut rest = code;
        for i in (0..n).rev() {
            let (xb, zb) = match rest % 4 {
                0 => (false, false),
                1 => (true, false),
                2 => (true, true),
                _ => (false, true),
            };
            p.set_x(i, xb);
            p.set_z(i, zb);
            rest /= 4;
        }
        p
    }

    /// Every point of `E_n` in code order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliIndex> {
        (0..1usize << (2 * n)).map(move |c| Self::from_code(n, c))
    }
}

fn set_bit(words: &mut [u64], i: usize, v: bool) {
    let mask = 1u64 << (i % WORD);
    if v {
        words[i / WORD] |= mask;
    } else {
        words[i / WORD] &= !mask;
    }
}

fn letter_bits(ch: char) -> Result<(bool, bool)> {
    match ch {
        'I' => Ok((false, false)),
        'X' => Ok((true, false)),
        'Y' => Ok((true, true)),
        'Z' => Ok((false, true)),
        other => Err(Error::InvalidInput(format!("bad Pauli letter {other:?}"))),
    }
}

fn check_same_n(a: &PauliIndex, b: &PauliIndex) -> Result<()> {
    if a.n != b.n {
        return Err(Error::SizeMismatch { left: a.n, right: b.n });
    }
    Ok(())
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (0..self.n).try_for_each(|i| write!(f, "{}", self.letter(i)))
    }
}

impl fmt::Debug for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliIndex({self})")
    }
}

pub(crate) fn omega_words(ax: &[u64], az: &[u64], bx: &[u64], bz: &[u64]) -> bool {
    let mut acc = 0u64;
    for i in 0..ax.len() {
        acc ^= (ax[i] & bz[i]) ^ (bx[i] & az[i]);
    }
    acc.count_ones() & 1 == 1
}

/// Exponent `e` (mod 4) with `T_a T_b = i^e T_{a+b}`.
///
/// Writing `T_a = i^{|a^X & a^Z|} X^{a^X} Z^{a^Z}` and commuting `Z^{a^Z}`
/// past `X^{b^X}` gives `i^{|a^X a^Z| + |b^X b^Z| + 2|a^Z b^X|}` times
/// `X^{c^X} Z^{c^Z} = i^{-|c^X c^Z|} T_c`.
pub(crate) fn product_exponent(ax: &[u64], az: &[u64], bx: &[u64], bz: &[u64]) -> u8 {
    let mut e: u64 = 0;
    for i in 0..ax.len() {
        let cx = ax[i] ^ bx[i];
        let cz = az[i] ^ bz[i];
        e += (ax[i] & az[i]).count_ones() as u64;
        e += (bx[i] & bz[i]).count_ones() as u64;
        e += 2 * (az[i] & bx[i]).count_ones() as u64;
        e += 3 * (cx & cz).count_ones() as u64;
    }
    (e % 4) as u8
}

/// Symplectic form: 1 iff `T_a` and `T_b` anticommute.
pub fn omega(a: &PauliIndex, b: &PauliIndex) -> Result<bool> {
    check_same_n(a, b)?;
    Ok(omega_words(&a.x, &a.z, &b.x, &b.z))
}

/// Sign bit with `T_a T_b = (-1)^beta T_{a+b}` for commuting `a, b`.
pub fn beta(a: &PauliIndex, b: &PauliIndex) -> Result<bool> {
    check_same_n(a, b)?;
    if omega_words(&a.x, &a.z, &b.x, &b.z) {
        return Err(Error::Precondition(format!("beta needs commuting indices, got {a} and {b}")));
    }
    Ok(beta_unchecked(a, b))
}

pub(crate) fn beta_unchecked(a: &PauliIndex, b: &PauliIndex) -> bool {
    product_exponent(&a.x, &a.z, &b.x, &b.z) == 2
}

/// `i^phase T_index`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    phase: u8,
    index: PauliIndex,
}

impl PhasedPauli {
    pub fn new(phase: u8, index: PauliIndex) -> Self {
        Self { phase: phase % 4, index }
    }

    /// `(-1)^sign T_index`.
    pub fn signed(sign: bool, index: PauliIndex) -> Self {
        Self::new(if sign { 2 } else { 0 }, index)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(0, PauliIndex::identity(n))
    }

    /// Parses an optional `+`/`-` (or `+i`/`-i`) prefix followed by letters
    /// from `{I, X, Y, Z}`.
    pub fn parse(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(Error::InvalidInput(format!("empty Pauli string {s:?}")));
        }
        Ok(Self::new(phase, PauliIndex::parse(rest)?))
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn index(&self) -> &PauliIndex {
        &self.index
    }

    pub fn into_index(self) -> PauliIndex {
        self.index
    }

    pub fn n(&self) -> usize {
        self.index.n
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// Sign bit of a Hermitian operator, `None` for phases `i` and `-i`.
    pub fn sign(&self) -> Option<bool> {
        self.is_hermitian().then_some(self.phase == 2)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_same_n(&self.index, &other.index)?;
        let (a, b) = (&self.index, &other.index);
        let e = product_exponent(&a.x, &a.z, &b.x, &b.z);
        Ok(Self::new(self.phase + other.phase + e, a.add_unchecked(b)))
    }

    /// `U p U^dagger` for a Clifford gate `U`.
    pub fn conjugate(&self, gate: CliffordGate) -> Result<Self> {
        gate.check(self.n())?;
        let mut out = self.clone();
        let flip = gate.conjugate_bits(&mut out.index.x, &mut out.index.z);
        if flip {
            out.phase = (out.phase + 2) % 4;
        }
        Ok(out)
    }

    /// Dense matrix of `i^phase T_index`, qubit 0 as the leftmost factor.
    pub fn materialize(&self) -> Result<DenseOperator> {
        check_dense_size(self.n(), "dense Pauli materialization")?;
        let factors: Vec<DenseOperator> = (0..self.n()).map(|i| single_qubit_matrix(self.index.letter(i))).collect();
        let m = crate::oracle::tensor_all(&factors);
        let ph = match self.phase {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Ok(m.scale(ph))
    }
}

pub(crate) fn single_qubit_matrix(letter: char) -> DenseOperator {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let rows = match letter {
        'I' => [[o, z], [z, o]],
        'X' => [[z, o], [o, z]],
        'Y' => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    };
    DenseOperator::from_fn(2, 2, |r, c| rows[r][c])
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.index)
    }
}

impl fmt::Debug for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhasedPauli({self})")
    }
}

/// Elementary Clifford gates. Two-qubit gates take `(control, target)`;
/// for `Cz` the order is irrelevant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cz(usize, usize),
    Cnot(usize, usize),
}

impl CliffordGate {
    pub fn name(&self) -> &'static str {
        match self {
            CliffordGate::H(_) => "H",
            CliffordGate::S(_) => "S",
            CliffordGate::X(_) => "X",
            CliffordGate::Y(_) => "Y",
            CliffordGate::Z(_) => "Z",
            CliffordGate::Cz(..) => "CZ",
            CliffordGate::Cnot(..) => "CNOT",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::X(q) | CliffordGate::Y(q) | CliffordGate::Z(q) => {
                vec![q]
            }
            CliffordGate::Cz(a, b) | CliffordGate::Cnot(a, b) => vec![a, b],
        }
    }

    /// Builds a gate from its name and qubit list.
    pub fn from_name(name: &str, qubits: &[usize]) -> Result<Self> {
        let one = |f: fn(usize) -> CliffordGate| match qubits {
            [q] => Ok(f(*q)),
            _ => Err(Error::InvalidInput(format!("gate {name} takes one qubit"))),
        };
        let two = |f: fn(usize, usize) -> CliffordGate| match qubits {
            [a, b] => Ok(f(*a, *b)),
            _ => Err(Error::InvalidInput(format!("gate {name} takes two qubits"))),
        };
        match name.to_ascii_uppercase().as_str() {
            "H" => one(CliffordGate::H),
            "S" => one(CliffordGate::S),
            "X" => one(CliffordGate::X),
            "Y" => one(CliffordGate::Y),
            "Z" => one(CliffordGate::Z),
            "CZ" => two(CliffordGate::Cz),
            "CNOT" | "CX" => two(CliffordGate::Cnot),
            other => Err(Error::InvalidInput(format!("unknown Clifford gate {other:?}"))),
        }
    }

    /// Range and distinctness check against `n` qubits.
    pub fn check(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidInput(format!("{} needs two distinct qubits", self.name())));
        }
        Ok(())
    }

    /// Applies the symplectic action to packed bits in place and reports
    /// whether the Hermitian operator picks up a minus sign.
    pub(crate) fn conjugate_bits(&self, x: &mut [u64], z: &mut [u64]) -> bool {
        let get = |w: &[u64], q: usize| (w[q / WORD] >> (q % WORD)) & 1 == 1;
        match *self {
            CliffordGate::H(q) => {
                let (xb, zb) = (get(x, q), get(z, q));
                set_bit(x, q, zb);
                set_bit(z, q, xb);
                xb && zb
            }
            CliffordGate::S(q) => {
                let (xb, zb) = (get(x, q), get(z, q));
                set_bit(z, q, zb ^ xb);
                xb && zb
            }
            CliffordGate::X(q) => get(z, q),
            CliffordGate::Z(q) => get(x, q),
            CliffordGate::Y(q) => get(x, q) ^ get(z, q),
            CliffordGate::Cnot(c, t) => {
                let (xc, zc, xt, zt) = (get(x, c), get(z, c), get(x, t), get(z, t));
                set_bit(x, t, xt ^ xc);
                set_bit(z, c, zc ^ zt);
                xc && zt && !(xt ^ zc)
            }
            CliffordGate::Cz(a, b) => {
                let (xa, za, xb, zb) = (get(x, a), get(z, a), get(x, b), get(z, b));
                set_bit(z, a, za ^ xb);
                set_bit(z, b, zb ^ xa);
                xa && xb && (za ^ zb)
            }
        }
    }

    /// Dense unitary on `n` qubits.
    pub fn unitary(&self, n: usize) -> Result<DenseOperator> {
        self.check(n)?;
        check_dense_size(n, "dense gate")?;
        let dim = 1usize << n;
        let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1 == 1;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let one = |q: usize, m: [[Complex64; 2]; 2]| {
            DenseOperator::from_fn(dim, dim, |r, c| {
                let rest = !(1usize << (n - 1 - q));
                if r & rest != c & rest {
                    return Complex64::new(0.0, 0.0);
                }
                m[bit(r, q) as usize][bit(c, q) as usize]
            })
        };
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        Ok(match *self {
            CliffordGate::H(q) => one(q, [[o * s, o * s], [o * s, -o * s]]),
            CliffordGate::S(q) => one(q, [[o, z], [z, i]]),
            CliffordGate::X(q) => one(q, [[z, o], [o, z]]),
            CliffordGate::Y(q) => one(q, [[z, -i], [i, z]]),
            CliffordGate::Z(q) => one(q, [[o, z], [z, -o]]),
            CliffordGate::Cz(a, b) => DenseOperator::from_fn(dim, dim, |r, c| {
                if r != c {
                    z
                } else if bit(r, a) && bit(r, b) {
                    -o
                } else {
                    o
                }
            }),
            CliffordGate::Cnot(ctl, tgt) => DenseOperator::from_fn(dim, dim, |r, c| {
                let image = if bit(c, ctl) { c ^ (1 << (n - 1 - tgt)) } else { c };
                if r == image {
                    o
                } else {
                    z
                }
            }),
        })
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits().iter().map(ToString::to_string).collect();
        write!(f, "{}({})", self.name(), qs.join(","))
    }
}

/// The magic state `T |+><+| T^dagger`, Bloch vector `(1/sqrt2, 1/sqrt2, 0)`.
pub fn magic_t_state() -> DenseOperator {
    let h = 0.5;
    let e = Complex64::from_polar(h, -std::f64::consts::FRAC_PI_4);
    DenseOperator::from_fn(2, 2, |r, c| match (r, c) {
        (0, 1) => e,
        (1, 0) => e.conj(),
        _ => Complex64::new(h, 0.0),
    })
}

/// A value assignment `gamma` listed pointwise on its domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueAssignment {
    pub domain: Vec<PauliIndex>,
    pub values: Vec<bool>,
}

impl ValueAssignment {
    pub fn new(domain: Vec<PauliIndex>, values: Vec<bool>) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::InvalidInput("domain and values differ in length".into()));
        }
        Ok(Self { domain, values })
    }

    pub fn get(&self, a: &PauliIndex) -> Option<bool> {
        self.domain.iter().position(|d| d == a).map(|i| self.values[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_mul(a: &PhasedPauli, b: &PhasedPauli) -> DenseOperator {
        a.materialize().unwrap().matmul(&b.materialize().unwrap()).unwrap()
    }

    #[test]
    fn omega_examples() {
        let x = PauliIndex::parse("X").unwrap();
        let z = PauliIndex::parse("Z").unwrap();
        assert!(omega(&x, &z).unwrap());
        assert!(!omega(&x, &x).unwrap());
        let xx = PauliIndex::parse("XX").unwrap();
        let zz = PauliIndex::parse("ZZ").unwrap();
        assert!(!omega(&xx, &zz).unwrap());
        assert!(omega(&x, &xx).is_err());
    }

    #[test]
    fn omega_matches_dense_commutator() {
        for n in 1..=2 {
            for a in PauliIndex::all(n) {
                for b in PauliIndex::all(n) {
                    let pa = PhasedPauli::new(0, a.clone());
                    let pb = PhasedPauli::new(0, b.clone());
                    let commute = dense_mul(&pa, &pb).approx_eq(&dense_mul(&pb, &pa), 1e-12);
                    assert_eq!(omega(&a, &b).unwrap(), !commute, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn beta_examples() {
        let xx = PauliIndex::parse("XX").unwrap();
        let zz = PauliIndex::parse("ZZ").unwrap();
        assert!(beta(&xx, &zz).unwrap());
        for a in PauliIndex::all(2) {
            assert!(!beta(&a, &PauliIndex::identity(2)).unwrap());
            assert!(!beta(&a, &a).unwrap());
        }
        let x = PauliIndex::parse("X").unwrap();
        let z = PauliIndex::parse("Z").unwrap();
        assert!(matches!(beta(&x, &z), Err(Error::Precondition(_))));
    }

    #[test]
    fn beta_matches_dense_product() {
        for n in 1..=3 {
            for a in PauliIndex::all(n) {
                for b in PauliIndex::all(n) {
                    if omega(&a, &b).unwrap() {
                        continue;
                    }
                    let lhs = dense_mul(&PhasedPauli::new(0, a.clone()), &PhasedPauli::new(0, b.clone()));
                    let sum = PhasedPauli::signed(beta(&a, &b).unwrap(), a.add(&b).unwrap());
                    assert!(lhs.approx_eq(&sum.materialize().unwrap(), 1e-12), "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let x = PhasedPauli::parse("X").unwrap();
        let z = PhasedPauli::parse("Z").unwrap();
        let xz = x.multiply(&z).unwrap();
        assert_eq!(xz.phase(), 3);
        assert_eq!(xz.index(), &PauliIndex::parse("Y").unwrap());
        assert_eq!(x.multiply(&PhasedPauli::identity(1)).unwrap(), x);
        let y = PhasedPauli::parse("Y").unwrap();
        assert_eq!(y.multiply(&y).unwrap(), PhasedPauli::identity(1));
    }

    #[test]
    fn multiply_matches_dense() {
        for n in 1..=2 {
            for a in PauliIndex::all(n) {
                for b in PauliIndex::all(n) {
                    for (ta, tb) in [(0, 0), (1, 2), (3, 1)] {
                        let pa = PhasedPauli::new(ta, a.clone());
                        let pb = PhasedPauli::new(tb, b.clone());
                        let prod = pa.multiply(&pb).unwrap();
                        assert!(prod.materialize().unwrap().approx_eq(&dense_mul(&pa, &pb), 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn conjugate_examples() {
        let x = PhasedPauli::parse("X").unwrap();
        assert_eq!(x.conjugate(CliffordGate::H(0)).unwrap(), PhasedPauli::parse("+Z").unwrap());
        assert_eq!(x.conjugate(CliffordGate::S(0)).unwrap(), PhasedPauli::parse("+Y").unwrap());
        let xi = PhasedPauli::parse("XI").unwrap();
        assert_eq!(xi.conjugate(CliffordGate::Cz(0, 1)).unwrap(), PhasedPauli::parse("XZ").unwrap());
        assert!(matches!(xi.conjugate(CliffordGate::H(2)), Err(Error::QubitOutOfRange { .. })));
        assert!(xi.conjugate(CliffordGate::Cnot(1, 1)).is_err());
    }

    fn all_gates(n: usize) -> Vec<CliffordGate> {
        let mut gates = Vec::new();
        for q in 0..n {
            gates.extend([
                CliffordGate::H(q),
                CliffordGate::S(q),
                CliffordGate::X(q),
                CliffordGate::Y(q),
                CliffordGate::Z(q),
            ]);
            for r in 0..n {
                if r != q {
                    gates.extend([CliffordGate::Cz(q, r), CliffordGate::Cnot(q, r)]);
                }
            }
        }
        gates
    }

    #[test]
    fn conjugate_matches_dense() {
        for n in 1..=2 {
            for g in all_gates(n) {
                let u = g.unitary(n).unwrap();
                for a in PauliIndex::all(n) {
                    for t in [0, 1, 2] {
                        let p = PhasedPauli::new(t, a.clone());
                        let dense = p.materialize().unwrap().conjugate_by(&u).unwrap();
                        let sym = p.conjugate(g).unwrap();
                        assert_eq!(sym.phase() % 2, t % 2);
                        assert!(sym.materialize().unwrap().approx_eq(&dense, 1e-12), "{g} on {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn materialize_examples() {
        let x = PhasedPauli::parse("X").unwrap().materialize().unwrap();
        assert_eq!(x, single_qubit_matrix('X'));
        let y = PhasedPauli::parse("Y").unwrap().materialize().unwrap();
        assert_eq!(y, single_qubit_matrix('Y'));
        let id = PhasedPauli::identity(1).materialize().unwrap();
        assert_eq!(id, DenseOperator::identity(2));
        assert!(PhasedPauli::identity(7).materialize().is_err());
        for a in PauliIndex::all(2) {
            let m = PhasedPauli::new(2, a).materialize().unwrap();
            assert!(m.is_hermitian(1e-15));
            assert!(m.matmul(&m).unwrap().approx_eq(&DenseOperator::identity(4), 1e-15));
        }
    }

    #[test]
    fn text_form() {
        let p = PhasedPauli::parse("-XIYZ").unwrap();
        assert_eq!(p.to_string(), "-XIYZ");
        assert_eq!(p.sign(), Some(true));
        assert_eq!(PhasedPauli::parse("ZZ").unwrap().to_string(), "+ZZ");
        assert!(PhasedPauli::parse("XQ").is_err());
        assert!(PhasedPauli::parse("-").is_err());
        assert_eq!(PauliIndex::parse("Y").unwrap().code(), 2);
        assert_eq!(PauliIndex::parse("ZX").unwrap().code(), 13);
        assert_eq!(PauliIndex::from_code(2, 13).to_string(), "ZX");
    }

    #[test]
    fn magic_state_bloch_vector() {
        let rho = magic_t_state();
        let h = DenseOperator::from_fn(2, 2, |_, _| Complex64::new(0.5, 0.0));
        let t = DenseOperator::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => Complex64::new(1.0, 0.0),
            (1, 1) => Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            _ => Complex64::new(0.0, 0.0),
        });
        assert!(rho.approx_eq(&h.conjugate_by(&t).unwrap(), 1e-15));
    }

    fn arb_index(n: usize) -> impl Strategy<Value = PauliIndex> {
        (proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(any::<bool>(), n))
            .prop_map(|(x, z)| PauliIndex::from_bits(&x, &z).unwrap())
    }

    fn arb_triple() -> impl Strategy<Value = (PauliIndex, PauliIndex, PauliIndex)> {
        (3usize..=8).prop_flat_map(|n| (arb_index(n), arb_index(n), arb_index(n)))
    }

    proptest! {
        #[test]
        fn omega_bilinear_symmetric((a, b, c) in arb_triple()) {
            let ab = a.add(&b).unwrap();
            prop_assert_eq!(omega(&ab, &c).unwrap(), omega(&a, &c).unwrap() ^ omega(&b, &c).unwrap());
            prop_assert_eq!(omega(&a, &b).unwrap(), omega(&b, &a).unwrap());
            prop_assert!(!omega(&a, &a).unwrap());
        }

        #[test]
        fn multiply_associative((a, b, c) in arb_triple(), ta in 0u8..4, tb in 0u8..4, tc in 0u8..4) {
            let (p, q, r) = (PhasedPauli::new(ta, a), PhasedPauli::new(tb, b), PhasedPauli::new(tc, c));
            let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
            let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn wide_indices_round_trip(bits in proptest::collection::vec(0u8..4, 1..150)) {
            let s: String = bits.iter().map(|d| ['I', 'X', 'Y', 'Z'][*d as usize]).collect();
            let p = PauliIndex::parse(&s).unwrap();
            prop_assert_eq!(p.to_string(), s);
            let q = PhasedPauli::new(0, p.clone());
            prop_assert_eq!(q.multiply(&q).unwrap(), PhasedPauli::identity(p.n()));
        }
    }
}
