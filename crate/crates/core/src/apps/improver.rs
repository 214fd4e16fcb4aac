//! Stochastic improvers: `Z` with `X + Z >=ssd X` (the set `S_X`), and the
//! sufficient condition `E[Z | X + Z <= x] >= 0` (the set `N_X`).

use serde_json::{json, Value};

use crate::dependence::{cond_new, require_comonotone};
use crate::dist::{DiscreteDist, JointDist};
use crate::error::{Error, Result};
use crate::order::check_ssd;
use crate::scalar::Scalar;
use crate::verdict::OrderVerdict;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct ImproverReport<T> {
    /// `X + Z >=ssd X`.
    pub in_s: OrderVerdict<T>,
    /// `E[Z | X + Z <= x] >= 0` for all relevant `x`; the witness carries
    /// `E[-Z | X + Z <= x]`.
    pub in_n: OrderVerdict<T>,
}

impl<T: Scalar> ImproverReport<T> {
    pub fn to_json(&self) -> Value {
        json!({"in_S": self.in_s.to_json(), "in_N": self.in_n.to_json()})
    }
}

/// Both memberships for a joint law of `(X, Z)`.
pub fn improver_check<T: Scalar>(j: &JointDist<T>) -> ImproverReport<T> {
    let flipped = j.transform(|x, z| x.clone() + z.clone(), |_, z| -z.clone());
    ImproverReport {
        in_s: check_ssd(&j.sum_law(), &j.marginal_w()),
        in_n: cond_new(&flipped),
    }
}

/// For `(X, X + Z)` comonotone the two sets coincide; returns whether the
/// two verdicts agree, which is always expected.
pub fn prop4_check<T: Scalar>(j: &JointDist<T>) -> Result<bool> {
    let pairs: Vec<(T, T, T)> = j
        .atoms()
        .iter()
        .map(|a| (a.w.clone(), a.w.clone() + a.z.clone(), a.p.clone()))
        .collect();
    require_comonotone(&pairs)?;
    let r = improver_check(j);
    Ok(r.in_s.holds() == r.in_n.holds())
}

/// `(X, Z)` with `W, Z` standard normal of correlation `rho`, `X = W - Z`,
/// each coordinate replaced by an `n`-point midpoint discretization:
/// `Z = rho W + s V` with `V` an independent copy and `s = sqrt(1 - rho^2)`.
/// `s` must be supplied exactly, so `rho` is taken from a Pythagorean pair
/// `(rho, s)` such as `(5/13, 12/13)`.
pub fn gaussian_improver_joint(rho: &Rational, s: &Rational, n: usize) -> Result<JointDist<Rational>> {
    if rho.clone() * rho.clone() + s.clone() * s.clone() != Rational::ratio(1, 1) || *s < Rational::ratio(0, 1) {
        return Err(Error::InvalidParameter(format!(
            "need rho^2 + s^2 = 1 with s >= 0, got rho = {rho}, s = {s}"
        )));
    }
    let base: DiscreteDist<Rational> = crate::dist::ParamDist::Normal { mu: 0.0, sigma: 1.0 }.discretize(n)?;
    let mut atoms = Vec::with_capacity(n * n);
    for (w, pw) in base.atoms() {
        for (v, pv) in base.atoms() {
            let z = rho.clone() * w.clone() + s.clone() * v.clone();
            atoms.push((w.clone() - z.clone(), z, pw.clone() * pv.clone()));
        }
    }
    JointDist::from_triples(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn zero_improver_is_in_both() {
        let j = JointDist::from_triples(vec![(q(0, 1), q(0, 1), q(1, 2)), (q(3, 1), q(0, 1), q(1, 2))]).unwrap();
        let r = improver_check(&j);
        assert!(r.in_s.holds() && r.in_n.holds());
    }

    #[test]
    fn gaussian_counterexample_separates_the_sets() {
        let j = gaussian_improver_joint(&q(5, 13), &q(12, 13), 64).unwrap();
        let r = improver_check(&j);
        assert!(r.in_s.holds());
        assert!(!r.in_n.holds());
    }

    #[test]
    fn comonotone_shrink() {
        // Z = -X/2, X + Z = X/2 is increasing in X.
        let j = JointDist::from_triples([0, 1, 2, 4].iter().map(|&x| (q(x, 1), q(-x, 2), q(1, 4)))).unwrap();
        assert!(prop4_check(&j).unwrap());
        let r = improver_check(&j);
        assert!(!r.in_s.holds() && !r.in_n.holds());
    }

    #[test]
    fn constant_gain_on_a_constant() {
        let j = JointDist::from_triples(vec![(q(1, 1), q(1, 3), q(1, 1))]).unwrap();
        assert!(prop4_check(&j).unwrap());
        let r = improver_check(&j);
        assert!(r.in_s.holds() && r.in_n.holds());
    }

    #[test]
    fn prop4_requires_comonotone_input() {
        let j = JointDist::from_triples(vec![(q(0, 1), q(2, 1), q(1, 2)), (q(1, 1), q(0, 1), q(1, 2))]).unwrap();
        assert!(matches!(prop4_check(&j), Err(Error::NotComonotone(..))));
    }

    #[test]
    fn pythagorean_pair_is_enforced() {
        assert!(gaussian_improver_joint(&q(1, 2), &q(1, 2), 8).is_err());
    }
}
