//! Convex membership and robustness LPs.

use num::BigRational;

use super::{CoeffVector, VertexSet};
use crate::lp::{residual, solve, verify_farkas, LinearProgram, LpOutcome, LpScalar};
use crate::{Error, Result};

/// Residual a returned witness may leave on the moment equations.
const SELF_TEST_TOL: f64 = 1e-9;

/// Result of a membership test against `conv(V)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership<T> {
    /// Convex weights per vertex reproducing the target.
    Inside { weights: Vec<T> },
    /// A functional `f` over coefficient coordinates with `f . v <= 0` on
    /// every vertex and `f . target > 0`.
    Outside { functional: Vec<T> },
}

impl<T> Membership<T> {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

/// Affine decomposition `target = sum_alpha r_alpha v_alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T> {
    pub weights: Vec<T>,
    /// `sum |r_alpha|`, the robustness when the decomposition is optimal.
    pub negativity: T,
}

fn check_target(target: &CoeffVector, set: &VertexSet) -> Result<()> {
    if target.n() != set.n() {
        return Err(Error::SizeMismatch { left: target.n(), right: set.n() });
    }
    if !target.is_normalized(SELF_TEST_TOL) {
        return Err(Error::Precondition(format!("target has trace {}, expected 1", target.trace())));
    }
    if set.is_empty() {
        return Err(Error::Precondition("empty vertex set".into()));
    }
    Ok(())
}

/// Moment rows: normalization first, then every non-identity coefficient.
fn moment_rows<T: LpScalar>(set: &VertexSet) -> Vec<Vec<T>> {
    let dim = 1usize << (2 * set.n());
    let mut rows = vec![vec![T::one(); set.len()]];
    rows.extend((1..dim).map(|a| set.vectors().iter().map(|v| T::from_f64(v.coeffs()[a])).collect()));
    rows
}

fn moment_rhs<T: LpScalar>(target: &CoeffVector) -> Vec<T> {
    let mut b = vec![T::one()];
    b.extend(target.coeffs()[1..].iter().map(|&c| T::from_f64(c)));
    b
}

fn membership_in<T: LpScalar>(target: &CoeffVector, set: &VertexSet) -> Result<Membership<T>> {
    check_target(target, set)?;
    let a = moment_rows::<T>(set);
    let lp = LinearProgram { c: vec![T::zero(); set.len()], b: moment_rhs(target), a };
    match solve(&lp)? {
        LpOutcome::Optimal { x, .. } => {
            if residual(&lp, &x) > SELF_TEST_TOL {
                return Err(Error::Lp("membership witness fails to reproduce the target".into()));
            }
            Ok(Membership::Inside { weights: x })
        }
        LpOutcome::Infeasible { farkas } => {
            if !verify_farkas(&lp, &farkas, T::eps().to_f64()) {
                return Err(Error::Lp("membership certificate does not separate".into()));
            }
            // the normalization row pairs with c_0 = 2^{-n}
            let scale = T::from_f64((1u64 << set.n()) as f64);
            let mut functional = farkas;
            functional[0] = functional[0].clone() * scale;
            Ok(Membership::Outside { functional })
        }
        LpOutcome::Unbounded => Err(Error::Lp("feasibility program reported unbounded".into())),
    }
}

/// Is `target` a convex combination of the vertices? Floating point.
pub fn membership(target: &CoeffVector, set: &VertexSet) -> Result<Membership<f64>> {
    membership_in(target, set)
}

/// Exact membership; coefficients are snapped to nearby rationals first.
pub fn membership_exact(target: &CoeffVector, set: &VertexSet) -> Result<Membership<BigRational>> {
    membership_in(target, set)
}

fn robustness_in<T: LpScalar>(target: &CoeffVector, set: &VertexSet) -> Result<Decomposition<T>> {
    check_target(target, set)?;
    let k = set.len();
    let a: Vec<Vec<T>> = moment_rows::<T>(set)
        .into_iter()
        .map(|row| {
            let neg: Vec<T> = row.iter().map(|v| -v.clone()).collect();
            row.into_iter().chain(neg).collect()
        })
        .collect();
    let lp = LinearProgram { c: vec![T::one(); 2 * k], b: moment_rhs(target), a };
    match solve(&lp)? {
        LpOutcome::Optimal { x, objective } => {
            if residual(&lp, &x) > SELF_TEST_TOL {
                return Err(Error::Lp("robustness decomposition fails to reproduce the target".into()));
            }
            let weights = (0..k).map(|i| x[i].clone() - x[k + i].clone()).collect();
            Ok(Decomposition { weights, negativity: objective })
        }
        LpOutcome::Infeasible { .. } => {
            Err(Error::Infeasible("target lies outside the affine span of the vertices".into()))
        }
        LpOutcome::Unbounded => Err(Error::Lp("robustness program reported unbounded".into())),
    }
}

/// Minimal `sum |r_alpha|` over affine decompositions. Floating point.
pub fn robustness(target: &CoeffVector, set: &VertexSet) -> Result<Decomposition<f64>> {
    robustness_in(target, set)
}

/// Exact robustness for rational targets.
pub fn robustness_exact(target: &CoeffVector, set: &VertexSet) -> Result<Decomposition<BigRational>> {
    robustness_in(target, set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::magic_t_state;
    use num::One;

    fn rho_t() -> CoeffVector {
        CoeffVector::from_operator(&magic_t_state()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let sp1 = VertexSet::stabilizer(1).unwrap();
        let zero = sp1.vector(sp1.position("+Z").unwrap()).clone();
        match membership(&zero, &sp1).unwrap() {
            Membership::Inside { weights } => assert!((weights[sp1.position("+Z").unwrap()] - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        match membership(&rho_t(), &sp1).unwrap() {
            Membership::Outside { functional } => {
                let f = |v: &CoeffVector| v.coeffs().iter().zip(&functional).map(|(a, b)| a * b).sum::<f64>();
                assert!(f(&rho_t()) > 0.0);
                assert!(sp1.vectors().iter().all(|v| f(v) <= 1e-12));
            }
            other => panic!("{other:?}"),
        }
        assert!(membership(&rho_t(), &VertexSet::cnc(1).unwrap()).unwrap().is_inside());
        assert!(membership(&rho_t(), &VertexSet::stabilizer(2).unwrap()).is_err());
    }

    #[test]
    fn exact_membership_certificate() {
        let sp1 = VertexSet::stabilizer(1).unwrap();
        let cube = VertexSet::cnc(1).unwrap();
        let outside = cube.vector(0);
        assert!(!membership_exact(outside, &sp1).unwrap().is_inside());
        let mixed = CoeffVector::new(1, vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(membership_exact(&mixed, &sp1).unwrap().is_inside());
    }

    #[test]
    fn robustness_examples() {
        let sp1 = VertexSet::stabilizer(1).unwrap();
        let r = robustness(&rho_t(), &sp1).unwrap();
        assert!((r.negativity - 2f64.sqrt()).abs() < 1e-9);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mixed = CoeffVector::new(1, vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!((robustness(&mixed, &sp1).unwrap().negativity - 1.0).abs() < 1e-12);
        for v in sp1.vectors() {
            assert!(robustness_exact(v, &sp1).unwrap().negativity.is_one());
        }
        let zero_only = VertexSet::new(1, vec![("z".into(), sp1.vector(0).clone())]).unwrap();
        assert!(matches!(robustness(&rho_t(), &zero_only), Err(Error::Infeasible(_))));
    }
}
