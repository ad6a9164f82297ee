//! Dual polytope vertices by the double-description method.
//!
//! The dual of a vertex set `V` is `{A : Tr A = 1, Tr(A v) >= 0 for v in V}`.
//! In coefficient coordinates this is the slice `c_0 = 2^{-n}` of the cone
//! `{c : <c, v> >= 0, c_0 >= 0}`, whose extreme rays are found exactly over
//! the rationals by adding one halfspace at a time.

use num::{BigRational, Signed, Zero};

use super::{CoeffVector, VertexSet};
use crate::lp::snap_rational;
use crate::{Error, Result};

type Q = BigRational;

#[derive(Clone)]
struct Ray {
    v: Vec<Q>,
    /// Indices of processed constraints the ray is tight on.
    zeros: Vec<u64>,
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Scales so the first nonzero entry has magnitude one.
fn normalize(mut v: Vec<Q>) -> Vec<Q> {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).map(Signed::abs) {
        v.iter_mut().for_each(|x| *x = &*x / &lead);
    }
    v
}

/// Inverse of a square rational matrix, or `None` if singular.
fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let d = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { Q::from_integer(1.into()) } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..d {
        let p = (col..d).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, p);
        let piv = aug[col][col].clone();
        aug[col].iter_mut().for_each(|x| *x = &*x / &piv);
        let prow = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                row.iter_mut().zip(&prow).for_each(|(x, p)| *x = &*x - &f * p);
            }
        }
    }
    Some(aug.into_iter().map(|r| r[d..].to_vec()).collect())
}

/// Picks `d` linearly independent constraint rows, greedily in order.
fn independent_rows(cons: &[Vec<Q>], d: usize) -> Option<Vec<usize>> {
    let mut basis: Vec<(usize, Vec<Q>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in cons.iter().enumerate() {
        let mut r = row.clone();
        for (pc, b) in &basis {
            if !r[*pc].is_zero() {
                let f = &r[*pc] / &b[*pc];
                r.iter_mut().zip(b).for_each(|(x, y)| *x = &*x - &f * y);
            }
        }
        if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
            basis.push((pc, r));
            chosen.push(i);
            if chosen.len() == d {
                return Some(chosen);
            }
        }
    }
    None
}

fn extreme_rays(cons: &[Vec<Q>], d: usize) -> Result<Vec<Ray>> {
    let words = cons.len().div_ceil(64);
    let start = independent_rows(cons, d)
        .ok_or_else(|| Error::Precondition("dual cone is not pointed: the vertices do not span the space".into()))?;
    let basis: Vec<Vec<Q>> = start.iter().map(|&i| cons[i].clone()).collect();
    let inv = invert(&basis).expect("independent rows are invertible");
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let v = normalize((0..d).map(|r| inv[r][j].clone()).collect());
            let mut zeros = vec![0; words];
            for (k, &i) in start.iter().enumerate() {
                if k != j {
                    set_bit(&mut zeros, i);
                }
            }
            Ray { v, zeros }
        })
        .collect();
    for (h, con) in cons.iter().enumerate() {
        if start.contains(&h) {
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|r| dot(con, &r.v)).collect();
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for (i, val) in vals.iter().enumerate() {
            if val.is_positive() {
                pos.push(i);
            } else if val.is_negative() {
                neg.push(i);
            } else {
                let mut r = rays[i].clone();
                set_bit(&mut r.zeros, h);
                next.push(r);
            }
        }
        for &p in &pos {
            next.push(rays[p].clone());
        }
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = rays[p].zeros.iter().zip(&rays[q].zeros).map(|(a, b)| a & b).collect();
                let tight: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (tight as usize) + 2 < d {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| k == p || k == q || !subset(&common, &r.zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<Q> = rays[q].v.iter().zip(&rays[p].v).map(|(a, b)| &vals[p] * a - &vals[q] * b).collect();
                let mut zeros = common;
                set_bit(&mut zeros, h);
                next.push(Ray { v: normalize(v), zeros });
            }
        }
        rays = next;
    }
    Ok(rays)
}

/// Vertices of the dual polytope of `set`.
///
/// Only `n = 1` runs by default; `allow_two_qubits` unlocks `n = 2`, which
/// can be slow.
pub fn dual_vertices(set: &VertexSet, allow_two_qubits: bool) -> Result<VertexSet> {
    let n = set.n();
    if n == 0 || n > 2 || (n == 2 && !allow_two_qubits) {
        return Err(Error::TooLarge { what: "dual vertex enumeration", n });
    }
    let d = 1usize << (2 * n);
    let mut cons: Vec<Vec<Q>> =
        set.vectors().iter().map(|v| v.coeffs().iter().map(|&c| snap_rational(c)).collect()).collect();
    let mut trace = vec![Q::zero(); d];
    trace[0] = Q::from_integer(1.into());
    cons.push(trace);
    let rays = extreme_rays(&cons, d)?;
    let w = Q::new(1.into(), (1u64 << n).into());
    let mut vectors = Vec::with_capacity(rays.len());
    for r in rays {
        if !r.v[0].is_positive() {
            return Err(Error::Precondition("dual body is unbounded".into()));
        }
        let scale = &w / &r.v[0];
        let coeffs: Vec<f64> =
            r.v.iter().map(|x| num::ToPrimitive::to_f64(&(x * &scale)).unwrap_or(f64::NAN)).collect();
        vectors.push(CoeffVector::new(n, coeffs)?);
    }
    vectors.sort_by(|a, b| {
        b.coeffs()
            .iter()
            .zip(a.coeffs())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    VertexSet::new(n, vectors.into_iter().enumerate().map(|(i, v)| (format!("d{i}"), v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_of_octahedron_is_cube() {
        let sp1 = VertexSet::stabilizer(1).unwrap();
        let cube = dual_vertices(&sp1, false).unwrap();
        assert_eq!(cube.len(), 8);
        assert!(cube.same_vectors(&VertexSet::cnc(1).unwrap(), 1e-12));
        let back = dual_vertices(&cube, false).unwrap();
        assert!(back.same_vectors(&sp1, 1e-12));
        assert!(dual_vertices(&VertexSet::local_stabilizer(1).unwrap(), false).unwrap().same_vectors(&cube, 0.0));
    }

    #[test]
    fn scope_and_degenerate_inputs() {
        assert!(dual_vertices(&VertexSet::stabilizer(2).unwrap(), false).is_err());
        let sp1 = VertexSet::stabilizer(1).unwrap();
        let flat =
            VertexSet::new(1, sp1.labels()[..2].iter().cloned().zip(sp1.vectors()[..2].iter().cloned()).collect())
                .unwrap();
        assert!(dual_vertices(&flat, false).is_err());
    }
}
