//! Indemnity schedules, wide marketability, indifference premiums and
//! stop-loss premium comparisons.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::dependence::cond_icx;
use crate::dist::discrete::cmp_scalar;
use crate::dist::{DiscreteDist, JointDist, Law, ParamDist};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::verdict::{OrderVerdict, WitnessKind};

/// An insurance payout `I` with `0 <= I(x) <= x` on `x >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum IndemnitySchedule<T> {
    /// Linear interpolation between `(x, I(x))` knots starting at `(0, 0)`,
    /// constant after the last knot.
    PiecewiseLinear(Vec<(T, T)>),
    /// `I(x) = amount` for `x >= threshold`, else 0.
    Fixed { threshold: T, amount: T },
    /// `I(x) = (x - deductible)+`.
    StopLoss { deductible: T },
}

impl<T: Scalar> IndemnitySchedule<T> {
    pub fn piecewise_linear(knots: Vec<(T, T)>) -> Result<Self> {
        if knots.first().map(|(x, _)| !x.is_zero()).unwrap_or(true) {
            return Err(Error::InvalidParameter("first knot must sit at x = 0".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter("knot abscissae must increase strictly".into()));
            }
        }
        // Both I and the identity are linear between knots and I is flat
        // after the last one, so the bound only needs checking at knots.
        if let Some((x, i)) = knots.iter().find(|(x, i)| i.is_negative() || i > x) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= I(x) <= x, but I({x}) = {i}"
            )));
        }
        Ok(IndemnitySchedule::PiecewiseLinear(knots))
    }

    pub fn fixed(threshold: T, amount: T) -> Result<Self> {
        if amount.is_negative() || amount > threshold {
            return Err(Error::InvalidParameter(format!(
                "fixed indemnity needs 0 <= amount <= threshold, got amount {amount} at {threshold}"
            )));
        }
        Ok(IndemnitySchedule::Fixed { threshold, amount })
    }

    pub fn stop_loss(deductible: T) -> Result<Self> {
        if deductible.is_negative() {
            return Err(Error::InvalidParameter(format!("negative deductible {deductible}")));
        }
        Ok(IndemnitySchedule::StopLoss { deductible })
    }

    pub fn eval(&self, x: &T) -> T {
        match self {
            IndemnitySchedule::Fixed { threshold, amount } => {
                if x >= threshold {
                    amount.clone()
                } else {
                    T::zero()
                }
            }
            IndemnitySchedule::StopLoss { deductible } => (x.clone() - deductible.clone()).positive_part(),
            IndemnitySchedule::PiecewiseLinear(knots) => {
                let k = knots.partition_point(|(kx, _)| kx <= x);
                if k == 0 {
                    return T::zero();
                }
                if k == knots.len() {
                    return knots[k - 1].1.clone();
                }
                let (x0, y0) = &knots[k - 1];
                let (x1, y1) = &knots[k];
                y0.clone() + (y1.clone() - y0.clone()) * (x.clone() - x0.clone()) / (x1.clone() - x0.clone())
            }
        }
    }

    /// `|I(x) - I(y)| <= |x - y|`.
    pub fn is_1_lipschitz(&self) -> bool {
        match self {
            IndemnitySchedule::Fixed { amount, .. } => amount.is_zero(),
            IndemnitySchedule::StopLoss { .. } => true,
            IndemnitySchedule::PiecewiseLinear(knots) => knots.windows(2).all(|w| {
                let slope = (w[1].1.clone() - w[0].1.clone()) / (w[1].0.clone() - w[0].0.clone());
                slope.abs() <= T::one()
            }),
        }
    }

    pub fn convert<U: Scalar>(&self) -> Result<IndemnitySchedule<U>> {
        let c = |v: &T| {
            U::from_decimal_f64(v.to_f64_lossy()).ok_or_else(|| Error::InvalidParameter(format!("cannot convert {v}")))
        };
        Ok(match self {
            IndemnitySchedule::Fixed { threshold, amount } => IndemnitySchedule::Fixed {
                threshold: c(threshold)?,
                amount: c(amount)?,
            },
            IndemnitySchedule::StopLoss { deductible } => IndemnitySchedule::StopLoss {
                deductible: c(deductible)?,
            },
            IndemnitySchedule::PiecewiseLinear(knots) => IndemnitySchedule::PiecewiseLinear(
                knots.iter().map(|(x, i)| Ok((c(x)?, c(i)?))).collect::<Result<_>>()?,
            ),
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            IndemnitySchedule::Fixed { threshold, amount } => {
                json!({"type": "fixed", "threshold": threshold.to_json(), "amount": amount.to_json()})
            }
            IndemnitySchedule::StopLoss { deductible } => {
                json!({"type": "stop_loss", "deductible": deductible.to_json()})
            }
            IndemnitySchedule::PiecewiseLinear(knots) => json!({
                "type": "piecewise_linear",
                "knots": knots.iter().map(|(x, i)| json!([x.to_json(), i.to_json()])).collect::<Vec<_>>(),
            }),
        }
    }
}

fn require_nonnegative<T: Scalar>(x: &DiscreteDist<T>) -> Result<()> {
    if x.min_value().is_negative() {
        return Err(Error::InvalidParameter(format!(
            "losses must be nonnegative, smallest atom is {}",
            x.min_value()
        )));
    }
    Ok(())
}

/// `E[I(X) | X - I(X) >= x]` for `X ~ Exp(rate)` and a fixed indemnity.
/// Every `x <= 0` conditions on the whole space.
pub fn exp_fixed_conditional(rate: f64, threshold: f64, amount: f64, x: f64) -> f64 {
    let x = x.max(0.0);
    let below = ((-rate * x).exp() - (-rate * threshold).exp()).max(0.0);
    let above = (-rate * threshold.max(x + amount)).exp();
    amount * above / (below + above)
}

/// `E[I(X) | X - I(X) >= x]` for `X ~ Exp(rate)` and a stop-loss indemnity,
/// defined for `x <= deductible`.
pub fn exp_stop_loss_conditional(rate: f64, deductible: f64, x: f64) -> f64 {
    (-rate * (deductible - x.max(0.0))).exp() / rate
}

/// Sufficient condition for wide marketability at floor `p0`:
/// `E[I(X) | X - I(X) >= x] >= p0` for every relevant `x`. Witnesses carry
/// that conditional mean as `lhs` and `p0` as `rhs`.
pub fn marketable_check<T: Scalar>(i: &IndemnitySchedule<T>, loss: &Law<T>, p0: &T) -> Result<OrderVerdict<T>> {
    if p0.is_negative() {
        return Err(Error::InvalidParameter(format!("premium floor {p0} is negative")));
    }
    match loss {
        Law::Param(ParamDist::Exponential { rate }) => {
            let i = i.convert::<f64>()?;
            let p = p0.to_f64_lossy();
            // Both conditional means are nondecreasing in x, so the infimum
            // over relevant x is reached at x = 0. There X - I(X) >= 0 holds
            // everywhere and the conditional mean is E[I(X)].
            let at_zero =
                match i {
                    IndemnitySchedule::Fixed { threshold, amount } => amount * (-rate * threshold).exp(),
                    IndemnitySchedule::StopLoss { deductible } => (-rate * deductible).exp() / rate,
                    IndemnitySchedule::PiecewiseLinear(_) => return Err(Error::Unsupported(
                        "exponential losses support fixed and stop-loss indemnities; discretize for other schedules"
                            .into(),
                    )),
                };
            if p > at_zero {
                log::warn!("floor {p} exceeds E[I(X)] = {at_zero}; the condition cannot hold");
                let lift = |v: f64| T::from_f64(v).unwrap_or_else(T::zero);
                return Ok(OrderVerdict::fail(
                    WitnessKind::Threshold,
                    T::zero(),
                    lift(at_zero),
                    p0.clone(),
                ));
            }
            Ok(OrderVerdict::pass())
        }
        other => {
            let x = other
                .to_discrete()
                .ok_or_else(|| Error::Unsupported(format!("marketability for {other:?}")))?;
            require_nonnegative(&x)?;
            let expected = x.expect(|v| i.eval(v));
            if *p0 > expected {
                log::warn!("floor {p0} exceeds E[I(X)] = {expected}; the condition cannot hold");
            }
            let j = JointDist::from_triples(x.atoms().iter().map(|(v, p)| {
                let paid = i.eval(v);
                (v.clone() - paid.clone(), paid - p0.clone(), p.clone())
            }))?;
            Ok(restore_floor(cond_icx(&j), p0))
        }
    }
}

/// Turns a witness on `I(X) - p0` back into one on `I(X)` against `p0`.
fn restore_floor<T: Scalar>(v: OrderVerdict<T>, p0: &T) -> OrderVerdict<T> {
    match v.into_witness() {
        None => OrderVerdict::pass(),
        Some(w) => OrderVerdict::fail(w.kind, w.value, w.lhs + p0.clone(), p0.clone()),
    }
}

/// Increasing concave utilities with a unique premium root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Utility {
    Linear,
    /// `-exp(-a t)`, `a > 0`.
    Exponential(f64),
    /// `t^gamma` on `t >= 0`, `0 < gamma <= 1`.
    Power(f64),
}

impl Utility {
    pub fn validate(self) -> Result<Self> {
        match self {
            Utility::Exponential(a) if !(a.is_finite() && a > 0.0) => Err(Error::InvalidParameter(format!(
                "exponential utility needs a > 0, got {a}"
            ))),
            Utility::Power(g) if !(g > 0.0 && g <= 1.0) => Err(Error::InvalidParameter(format!(
                "power utility needs 0 < gamma <= 1, got {g}"
            ))),
            u => Ok(u),
        }
    }
}

/// Tolerance on the premium returned by [`indifference_premium`].
pub const PREMIUM_TOLERANCE: f64 = 1e-10;

/// The premium `P` with `E[u(w - X + I(X) - P)] = E[u(w - X)]`.
pub fn indifference_premium<T: Scalar>(
    u: Utility,
    w: f64,
    x: &DiscreteDist<T>,
    i: &IndemnitySchedule<T>,
) -> Result<f64> {
    let u = u.validate()?;
    require_nonnegative(x)?;
    if u == Utility::Linear {
        return Ok(x.expect(|v| i.eval(v)).to_f64_lossy());
    }
    let atoms: Vec<(f64, f64, f64)> = x
        .atoms()
        .iter()
        .map(|(v, p)| (v.to_f64_lossy(), i.eval(v).to_f64_lossy(), p.to_f64_lossy()))
        .collect();
    let top = atoms.iter().map(|a| a.1).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let worst = x.max_value().to_f64_lossy();
    // Utilities are only defined up to positive affine maps; recentring the
    // exponential at the worst wealth keeps every exponent bounded.
    let util = |t: f64| match u {
        Utility::Exponential(a) => -(-a * (t - (w - worst))).exp(),
        Utility::Power(g) => t.powf(g),
        Utility::Linear => t,
    };
    let mut hi = top;
    if let Utility::Power(_) = u {
        if w < worst {
            return Err(Error::InvalidParameter(format!(
                "power utility needs w >= max X = {worst}"
            )));
        }
        let floor = atoms
            .iter()
            .map(|(v, paid, _)| w - v + paid)
            .fold(f64::INFINITY, f64::min);
        hi = hi.min(floor);
    }
    let target: f64 = atoms.iter().map(|(v, _, p)| p * util(w - v)).sum();
    let gap = |prem: f64| {
        atoms
            .iter()
            .map(|(v, paid, p)| p * util(w - v + paid - prem))
            .sum::<f64>()
            - target
    };
    if gap(hi) > 0.0 {
        return Err(Error::Bracket(format!(
            "premium exceeds the admissible range [0, {hi}]"
        )));
    }
    let mut lo = 0.0;
    while hi - lo > PREMIUM_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if gap(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StopLossReport<T> {
    /// `E[Z | X >= x] >= 0` for every relevant `x`.
    pub condition: OrderVerdict<T>,
    pub deductibles: Vec<T>,
    pub premium_x: Vec<T>,
    pub premium_sum: Vec<T>,
}

impl<T: Scalar> StopLossReport<T> {
    /// `E[(X + Z - d)+] >= E[(X - d)+]` at every listed deductible.
    pub fn dominates(&self) -> bool {
        self.premium_sum.iter().zip(&self.premium_x).all(|(s, x)| s >= x)
    }

    pub fn to_json(&self) -> Value {
        let col = |v: &[T]| v.iter().map(Scalar::to_json).collect::<Vec<_>>();
        json!({
            "condition": self.condition.to_json(),
            "dominates": self.dominates(),
            "deductibles": col(&self.deductibles),
            "premium_x": col(&self.premium_x),
            "premium_sum": col(&self.premium_sum),
        })
    }
}

/// Stop-loss premiums of `X` and `X + Z` from a joint law of `(X, Z)`.
/// Both curves are piecewise linear with kinks at atoms, so the default
/// deductibles are the atoms of `X` and `X + Z`.
pub fn stop_loss_compare<T: Scalar>(j: &JointDist<T>, deductibles: Option<&[T]>) -> Result<StopLossReport<T>> {
    let x = j.marginal_w();
    require_nonnegative(&x)?;
    let sum = j.sum_law();
    let mut ds: Vec<T> = match deductibles {
        Some(d) => d.to_vec(),
        None => x.values().chain(sum.values()).cloned().collect(),
    };
    ds.sort_by(cmp_scalar);
    ds.dedup_by(|a, b| cmp_scalar(a, b) == Ordering::Equal);
    let report = StopLossReport {
        condition: cond_icx(j),
        premium_x: x.stop_loss_curve(&ds),
        premium_sum: sum.stop_loss_curve(&ds),
        deductibles: ds,
    };
    if T::EXACT && report.condition.holds() && !report.dominates() {
        return Err(Error::Internal(
            "stop-loss dominance failed under E[Z | X >= x] >= 0".into(),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn schedules_evaluate() {
        let pl = IndemnitySchedule::piecewise_linear(vec![(q(0, 1), q(0, 1)), (q(2, 1), q(1, 1)), (q(4, 1), q(3, 1))])
            .unwrap();
        assert_eq!(pl.eval(&q(1, 1)), q(1, 2));
        assert_eq!(pl.eval(&q(3, 1)), q(2, 1));
        assert_eq!(pl.eval(&q(10, 1)), q(3, 1));
        assert!(pl.is_1_lipschitz());
        let f = IndemnitySchedule::fixed(q(1, 1), q(1, 1)).unwrap();
        assert_eq!(f.eval(&q(1, 1)), q(1, 1));
        assert_eq!(f.eval(&q(99, 100)), q(0, 1));
        assert!(!f.is_1_lipschitz());
        assert!(IndemnitySchedule::fixed(q(1, 1), q(2, 1)).is_err());
        assert!(IndemnitySchedule::piecewise_linear(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(2, 1))]).is_err());
        assert!(IndemnitySchedule::piecewise_linear(vec![(q(1, 1), q(0, 1))]).is_err());
    }

    #[test]
    fn fixed_indemnity_on_exponential() {
        let e = std::f64::consts::E;
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            let v = exp_fixed_conditional(1.0, 1.0, 1.0, x);
            assert!((v - 1.0 / (1.0 + e - x.exp())).abs() < 1e-14);
        }
        assert_eq!(exp_fixed_conditional(1.0, 1.0, 1.0, 1.5), 1.0);
        let i = IndemnitySchedule::fixed(1.0, 1.0).unwrap();
        let x = Law::Param(ParamDist::Exponential { rate: 1.0 });
        assert!(marketable_check(&i, &x, &(-1.0f64).exp()).unwrap().holds());
        let v = marketable_check(&i, &x, &0.4).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.value, 0.0);
        assert_eq!(w.lhs, (-1.0f64).exp());
        assert_eq!(
            exp_fixed_conditional(1.0, 1.0, 1.0, -0.5),
            exp_fixed_conditional(1.0, 1.0, 1.0, 0.0)
        );
        assert!(marketable_check(&i, &x, &0.0).unwrap().holds());
    }

    #[test]
    fn discrete_marketability() {
        // X uniform on {0, 1, 2}, I(x) = 1{x >= 1}: X - I(X) is {0, 0, 1}.
        let x = Law::Discrete(DiscreteDist::uniform([q(0, 1), q(1, 1), q(2, 1)]).unwrap());
        let i = IndemnitySchedule::fixed(q(1, 1), q(1, 1)).unwrap();
        // At x = 0 the conditional mean is 2/3; at x = 1 it is 1.
        assert!(marketable_check(&i, &x, &q(2, 3)).unwrap().holds());
        let v = marketable_check(&i, &x, &q(3, 4)).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(
            (w.value.clone(), w.lhs.clone(), w.rhs.clone()),
            (q(0, 1), q(2, 3), q(3, 4))
        );
        assert!(marketable_check(&i, &x, &q(-1, 1)).is_err());
    }

    #[test]
    fn premiums() {
        let x = DiscreteDist::uniform([q(0, 1), q(1, 1), q(3, 1)]).unwrap();
        let i = IndemnitySchedule::stop_loss(q(1, 2)).unwrap();
        let expected = 1.0;
        assert_eq!(indifference_premium(Utility::Linear, 5.0, &x, &i).unwrap(), expected);
        for u in [Utility::Exponential(0.7), Utility::Power(0.5)] {
            let p = indifference_premium(u, 5.0, &x, &i).unwrap();
            assert!(p >= expected - PREMIUM_TOLERANCE, "{u:?}: {p}");
        }
        // Exponential utility has the closed form (ln E e^{aX} - ln E e^{a(X - I)}) / a.
        let a = 0.7f64;
        let m = |f: &dyn Fn(f64) -> f64| [0.0f64, 1.0, 3.0].iter().map(|v| f(*v)).sum::<f64>() / 3.0;
        let closed = (m(&|v| (a * v).exp()).ln() - m(&|v| (a * (v - (v - 0.5).max(0.0))).exp()).ln()) / a;
        let p = indifference_premium(Utility::Exponential(a), 5.0, &x, &i).unwrap();
        assert!((p - closed).abs() < 1e-9);
        let none = IndemnitySchedule::fixed(q(1, 1), q(0, 1)).unwrap();
        assert_eq!(
            indifference_premium(Utility::Exponential(1.0), 0.0, &x, &none).unwrap(),
            0.0
        );
        assert!(indifference_premium(Utility::Power(1.5), 5.0, &x, &i).is_err());
        assert!(indifference_premium(Utility::Power(0.5), 1.0, &x, &i).is_err());
    }

    #[test]
    fn stop_loss_translation() {
        let base = [(q(0, 1), q(1, 2)), (q(2, 1), q(1, 2))];
        let zero = JointDist::from_triples(base.iter().map(|(x, p)| (x.clone(), q(0, 1), p.clone()))).unwrap();
        let r = stop_loss_compare(&zero, None).unwrap();
        assert!(r.condition.holds());
        assert_eq!(r.premium_x, r.premium_sum);
        let shift = JointDist::from_triples(base.iter().map(|(x, p)| (x.clone(), q(1, 4), p.clone()))).unwrap();
        let r = stop_loss_compare(&shift, None).unwrap();
        assert!(r.condition.holds() && r.dominates());
        assert_eq!(r.deductibles[0], q(0, 1));
        assert_eq!(r.premium_sum[0].clone() - r.premium_x[0].clone(), q(1, 4));
        let negative = JointDist::from_triples(vec![(q(-1, 1), q(0, 1), q(1, 1))]).unwrap();
        assert!(stop_loss_compare(&negative, None).is_err());
    }
}
