//! Dense two-phase simplex with Bland's rule.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` over any [`LpScalar`]: `f64`
//! with a pivot tolerance, or `BigRational` for exact certificates. An
//! infeasible problem comes back with a Farkas vector `y` satisfying
//! `y.A_j <= 0` for every column and `y.b > 0`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, FromPrimitive, ToPrimitive, Zero};

use crate::{Error, Result};

const MAX_PIVOTS: usize = 200_000;

/// Ordered field the simplex runs over.
pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Magnitudes at or below this count as zero.
    fn eps() -> Self;
    /// Phase-one residual above which a program counts as infeasible.
    fn feasibility_tol() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn is_pos(&self) -> bool {
        *self > Self::eps()
    }

    fn is_neg(&self) -> bool {
        *self < -Self::eps()
    }

    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn eps() -> Self {
        1e-11
    }

    fn feasibility_tol() -> Self {
        1e-9
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        num::One::one()
    }

    fn eps() -> Self {
        Zero::zero()
    }

    fn feasibility_tol() -> Self {
        Zero::zero()
    }

    /// Rational reconstruction: values within `1e-12` of a fraction with
    /// denominator at most 4096 snap to it; anything else converts exactly.
    fn from_f64(v: f64) -> Self {
        snap_rational(v)
    }

    fn to_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }
}

pub fn snap_rational(v: f64) -> BigRational {
    let mut den: i64 = 1;
    while den <= 4096 {
        let num = (v * den as f64).round();
        if (num / den as f64 - v).abs() <= 1e-12 {
            return BigRational::new(BigInt::from(num as i64), BigInt::from(den));
        }
        den += 1;
    }
    <BigRational as FromPrimitive>::from_f64(v).unwrap_or_else(Zero::zero)
}

/// `min c.x` subject to `A x = b`, `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal {
        x: Vec<T>,
        objective: T,
    },
    /// Farkas certificate `y` with `y.A_j <= 0` for all `j` and `y.b > 0`.
    Infeasible {
        farkas: Vec<T>,
    },
    Unbounded,
}

struct Tableau<T> {
    m: usize,
    n: usize,
    /// `m` rows of `n + m + 1` entries: structural, artificial, right-hand side.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
}

impl<T: LpScalar> Tableau<T> {
    fn width(&self) -> usize {
        self.n + self.m + 1
    }

    fn rhs(&self, r: usize) -> &T {
        &self.rows[r][self.n + self.m]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width();
        let p = self.rows[r][col].clone();
        for j in 0..w {
            self.rows[r][j] = self.rows[r][j].clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col].clone();
            if f == T::zero() {
                continue;
            }
            for j in 0..w {
                row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
            }
        }
        self.basis[r] = col;
    }

    /// Reduced costs `c_j - c_B B^{-1} A_j` for all columns.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let w = self.n + self.m;
        (0..w)
            .map(|j| {
                let mut d = cost[j].clone();
                for r in 0..self.m {
                    let cb = &cost[self.basis[r]];
                    if *cb != T::zero() {
                        d = d - cb.clone() * self.rows[r][j].clone();
                    }
                }
                d
            })
            .collect()
    }

    /// Runs Bland's rule with entering columns restricted to `allowed`.
    /// Returns false if unbounded.
    fn optimize(&mut self, cost: &[T], allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let d = self.reduced_costs(cost);
            let Some(col) = (0..allowed).find(|&j| d[j].is_neg()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.m {
                let a = &self.rows[r][col];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs(r).clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((r, _)) = best else { return Ok(false) };
            self.pivot(r, col);
        }
        Err(Error::Lp("pivot limit exceeded".into()))
    }
}

/// Solves the program with the two-phase method.
pub fn solve<T: LpScalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>> {
    let m = lp.a.len();
    let n = lp.c.len();
    if lp.b.len() != m || lp.a.iter().any(|row| row.len() != n) {
        return Err(Error::Lp("inconsistent program dimensions".into()));
    }
    let flipped: Vec<bool> = lp.b.iter().map(|b| *b < T::zero()).collect();
    let mut rows = Vec::with_capacity(m);
    for (i, ((a, b), &flip)) in lp.a.iter().zip(&lp.b).zip(&flipped).enumerate() {
        let sgn = |v: &T| if flip { -v.clone() } else { v.clone() };
        let mut row: Vec<T> = a.iter().map(sgn).collect();
        row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        row.push(sgn(b));
        rows.push(row);
    }
    let mut t = Tableau { m, n, rows, basis: (n..n + m).collect() };

    let phase1: Vec<T> = (0..n + m).map(|j| if j < n { T::zero() } else { T::one() }).collect();
    t.optimize(&phase1, n + m)?;
    let infeasibility = (0..m).fold(T::zero(), |acc, r| acc + phase1[t.basis[r]].clone() * t.rhs(r).clone());
    if infeasibility > T::feasibility_tol() {
        let farkas = (0..m)
            .map(|i| {
                let y = (0..m).fold(T::zero(), |acc, r| acc + phase1[t.basis[r]].clone() * t.rows[r][n + i].clone());
                if flipped[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        return Ok(LpOutcome::Infeasible { farkas });
    }

    // drive zero-level artificials out of the basis where possible
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !t.rows[r][j].is_negligible()) {
                t.pivot(r, col);
            }
        }
    }

    let mut phase2 = lp.c.clone();
    phase2.extend((0..m).map(|_| T::zero()));
    if !t.optimize(&phase2, n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![T::zero(); n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).clone();
        }
    }
    let objective = x.iter().zip(&lp.c).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    Ok(LpOutcome::Optimal { x, objective })
}

/// Largest `|A x - b|` entry, for self-tests on returned solutions.
pub fn residual<T: LpScalar>(lp: &LinearProgram<T>, x: &[T]) -> f64 {
    lp.a.iter()
        .zip(&lp.b)
        .map(|(row, bi)| {
            let ax = row.iter().zip(x).fold(T::zero(), |acc, (a, xi)| acc + a.clone() * xi.clone());
            (ax - bi.clone()).to_f64().abs()
        })
        .fold(0.0, f64::max)
}

/// Checks a Farkas certificate: `y.A_j <= tol` for all columns and
/// `y.b > tol`.
pub fn verify_farkas<T: LpScalar>(lp: &LinearProgram<T>, y: &[T], tol: f64) -> bool {
    let n = lp.c.len();
    let cols_ok = (0..n).all(|j| {
        let v = lp.a.iter().zip(y).fold(T::zero(), |acc, (row, yi)| acc + row[j].clone() * yi.clone());
        v.to_f64() <= tol
    });
    let yb = lp.b.iter().zip(y).fold(T::zero(), |acc, (b, yi)| acc + b.clone() * yi.clone());
    cols_ok && yb.to_f64() > tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = LinearProgram {
            a: vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]],
            b: vec![4.0, 6.0],
            c: vec![-1.0, -1.0, 0.0, 0.0],
        };
        match solve(&lp).unwrap() {
            LpOutcome::Optimal { x, objective } => {
                assert!((objective + 2.8).abs() < 1e-12);
                assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
                assert!(residual(&lp, &x) < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exact_optimum() {
        let lp = LinearProgram {
            a: vec![vec![r(1, 1), r(2, 1), r(1, 1), r(0, 1)], vec![r(3, 1), r(1, 1), r(0, 1), r(1, 1)]],
            b: vec![r(4, 1), r(6, 1)],
            c: vec![r(-1, 1), r(-1, 1), r(0, 1), r(0, 1)],
        };
        match solve(&lp).unwrap() {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(objective, r(-14, 5));
                assert_eq!(x[0], r(8, 5));
                assert_eq!(x[1], r(6, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        // x + y = 1, x + y = 2
        let lp = LinearProgram { a: vec![vec![1.0, 1.0], vec![1.0, 1.0]], b: vec![1.0, 2.0], c: vec![0.0, 0.0] };
        match solve(&lp).unwrap() {
            LpOutcome::Infeasible { farkas } => assert!(verify_farkas(&lp, &farkas, 1e-12)),
            other => panic!("{other:?}"),
        }
        // x = -1 with x >= 0, negative right-hand side
        let lp = LinearProgram { a: vec![vec![1.0]], b: vec![-1.0], c: vec![0.0] };
        match solve(&lp).unwrap() {
            LpOutcome::Infeasible { farkas } => assert!(verify_farkas(&lp, &farkas, 1e-12)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        // min -x s.t. x - y = 0
        let lp = LinearProgram { a: vec![vec![1.0, -1.0]], b: vec![0.0], c: vec![-1.0, 0.0] };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let lp = LinearProgram { a: vec![vec![1.0, 1.0], vec![2.0, 2.0]], b: vec![1.0, 2.0], c: vec![1.0, 2.0] };
        match solve(&lp).unwrap() {
            LpOutcome::Optimal { x, objective } => {
                assert!((objective - 1.0).abs() < 1e-12);
                assert!((x[0] - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(0.5), r(1, 2));
        assert_eq!(snap_rational(1.0 / 3.0), r(1, 3));
        assert_eq!(snap_rational(-0.25 + 1e-14), r(-1, 4));
    }
}
