//! Decision procedures for the usual stochastic, second-order, increasing
//! convex and convex orders.
//!
//! Every discrete check compares two piecewise-linear functions whose kinks
//! lie in a known finite set (envelope breakpoints or atom values), so
//! evaluating at the merged kink set decides the relation exactly. Ties
//! count as holding.

use std::str::FromStr;

use crate::dist::discrete::cmp_scalar;
use crate::dist::{DiscreteDist, Law, ParamDist};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::special::{normal_pdf, normal_quantile, normal_sf};
use crate::verdict::{OrderVerdict, WitnessKind};

/// Tolerance on the equal-means test for normal laws.
pub const NORMAL_MEAN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `X >=ssd Y`
    Ssd,
    /// `X >=icx Y`
    Icx,
    /// `X <=cx Y`
    Cx,
    /// `X >=st Y`
    St,
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ssd" => Ok(Relation::Ssd),
            "icx" => Ok(Relation::Icx),
            "cx" => Ok(Relation::Cx),
            "st" => Ok(Relation::St),
            other => Err(Error::Input(format!("unknown relation '{other}'"))),
        }
    }
}

fn merged_sorted<'a, T: Scalar>(a: impl Iterator<Item = &'a T>, b: impl Iterator<Item = &'a T>) -> Vec<T> {
    let mut all: Vec<T> = a.chain(b).cloned().collect();
    all.sort_by(cmp_scalar);
    all.dedup();
    all
}

/// First index where `lhs < rhs`, as a failing verdict.
fn first_violation<T: Scalar>(kind: WitnessKind, at: &[T], lhs: &[T], rhs: &[T]) -> OrderVerdict<T> {
    for ((v, l), r) in at.iter().zip(lhs).zip(rhs) {
        if l < r {
            return OrderVerdict::fail(kind, v.clone(), l.clone(), r.clone());
        }
    }
    OrderVerdict::pass()
}

/// `X >=icx Y`: `ES_p(X) >= ES_p(Y)` at every level in `[0,1)`, checked on
/// the union of both envelopes' breakpoints. The witness carries both ES
/// values.
pub fn check_icx<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> OrderVerdict<T> {
    let ex = x.phi_envelope();
    let ey = y.phi_envelope();
    let mut levels = merged_sorted(ex.levels(), ey.levels());
    levels.pop(); // p = 1, where both sides vanish
    let px = ex.eval_sorted(&levels).expect("levels in [0,1]");
    let py = ey.eval_sorted(&levels).expect("levels in [0,1]");
    for ((p, a), b) in levels.iter().zip(&px).zip(&py) {
        if a < b {
            let scale = T::one() - p.clone();
            return OrderVerdict::fail(
                WitnessKind::Level,
                p.clone(),
                a.clone() / scale.clone(),
                b.clone() / scale,
            );
        }
    }
    OrderVerdict::pass()
}

/// `X >=ssd Y` through the integrated quantiles: `∫_0^p Q_X >= ∫_0^p Q_Y`
/// for all `p`. The reflected route `-Y >=icx -X` is evaluated as well and
/// must agree.
pub fn check_ssd<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> OrderVerdict<T> {
    let verdict = integrated_quantile_dominance(x, y);
    let reflected = check_icx(&y.negate(), &x.negate());
    assert_eq!(
        verdict.holds(),
        reflected.holds(),
        "integrated-quantile and reflected icx routes disagree"
    );
    verdict
}

fn integrated_quantile_dominance<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> OrderVerdict<T> {
    let ex = x.phi_envelope();
    let ey = y.phi_envelope();
    let mut levels = merged_sorted(ex.levels(), ey.levels());
    levels.remove(0); // p = 0, where both integrals vanish
    let (mx, my) = (x.mean(), y.mean());
    let ix: Vec<T> = ex
        .eval_sorted(&levels)
        .expect("levels in [0,1]")
        .into_iter()
        .map(|v| mx.clone() - v)
        .collect();
    let iy: Vec<T> = ey
        .eval_sorted(&levels)
        .expect("levels in [0,1]")
        .into_iter()
        .map(|v| my.clone() - v)
        .collect();
    first_violation(WitnessKind::Level, &levels, &ix, &iy)
}

/// `X <=cx Y`: equal means and `X >=ssd Y`. A mean mismatch is reported at
/// level `1`, where the integrated quantiles are the means.
pub fn check_cx<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> OrderVerdict<T> {
    let (mx, my) = (x.mean(), y.mean());
    if mx != my {
        return OrderVerdict::fail(WitnessKind::Level, T::one(), mx, my);
    }
    check_ssd(x, y)
}

/// `X >=st Y`: `P(X > t) >= P(Y > t)` at every atom of either law.
pub fn check_st<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> OrderVerdict<T> {
    let ts = merged_sorted(x.values(), y.values());
    first_violation(
        WitnessKind::Threshold,
        &ts,
        &x.survival_curve(&ts),
        &y.survival_curve(&ts),
    )
}

/// Independent check of `X >=ssd Y` through `t -> E[min(X, t)]`, evaluated
/// at every atom of either law. Shares no code with the envelope route.
pub fn oracle_ssd<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> OrderVerdict<T> {
    let ts = merged_sorted(x.values(), y.values());
    first_violation(WitnessKind::Angle, &ts, &x.angle_curve(&ts), &y.angle_curve(&ts))
}

/// Independent check of `X >=icx Y` through the stop-loss transform
/// `t -> E[(X - t)+]` at every atom of either law.
pub fn oracle_icx<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> OrderVerdict<T> {
    let ts = merged_sorted(x.values(), y.values());
    first_violation(
        WitnessKind::Angle,
        &ts,
        &x.stop_loss_curve(&ts),
        &y.stop_loss_curve(&ts),
    )
}

/// Normal pair `(mu, sigma)`.
#[derive(Clone, Copy, Debug)]
struct Gauss {
    mu: f64,
    sigma: f64,
}

/// Smallest level of the form `1 - 2^-k` (or `2^-k` when `toward_zero`)
/// at which `gap` turns negative.
fn search_level<F: Fn(f64) -> f64>(gap: F, toward_zero: bool) -> Option<f64> {
    (1..1075).map(|k| 0.5f64.powi(k)).find_map(|e| {
        let p = if toward_zero { e } else { 1.0 - e };
        (p > 0.0 && p < 1.0 && gap(p) < 0.0).then_some(p)
    })
}

fn normal_icx(x: Gauss, y: Gauss) -> OrderVerdict<f64> {
    let es = |g: Gauss, p: f64| g.mu + g.sigma * normal_pdf(normal_quantile(p)) / (1.0 - p);
    if x.mu < y.mu {
        return OrderVerdict::fail(WitnessKind::Level, 0.0, x.mu, y.mu);
    }
    if x.sigma < y.sigma {
        let p = search_level(|p| es(x, p) - es(y, p), false).unwrap_or(1.0 - f64::EPSILON);
        return OrderVerdict::fail(WitnessKind::Level, p, es(x, p), es(y, p));
    }
    OrderVerdict::pass()
}

fn normal_ssd(x: Gauss, y: Gauss) -> OrderVerdict<f64> {
    let iq = |g: Gauss, p: f64| {
        if p >= 1.0 {
            g.mu
        } else {
            g.mu * p - g.sigma * normal_pdf(normal_quantile(p))
        }
    };
    let verdict = if x.mu < y.mu {
        OrderVerdict::fail(WitnessKind::Level, 1.0, x.mu, y.mu)
    } else if x.sigma > y.sigma {
        let p = search_level(|p| iq(x, p) - iq(y, p), true).unwrap_or(f64::MIN_POSITIVE);
        OrderVerdict::fail(WitnessKind::Level, p, iq(x, p), iq(y, p))
    } else {
        OrderVerdict::pass()
    };
    let neg = |g: Gauss| Gauss {
        mu: -g.mu,
        sigma: g.sigma,
    };
    assert_eq!(verdict.holds(), normal_icx(neg(y), neg(x)).holds());
    verdict
}

fn normal_st(x: Gauss, y: Gauss) -> OrderVerdict<f64> {
    let sx = |t: f64| normal_sf((t - x.mu) / x.sigma);
    let sy = |t: f64| normal_sf((t - y.mu) / y.sigma);
    if x.sigma == y.sigma {
        if x.mu >= y.mu {
            return OrderVerdict::pass();
        }
        let t = 0.5 * (x.mu + y.mu);
        return OrderVerdict::fail(WitnessKind::Threshold, t, sx(t), sy(t));
    }
    // Survival functions cross once where the standardized values agree;
    // the law with the larger scale loses below the crossing if it is X,
    // above it if it is Y.
    let cross = (x.mu * y.sigma - y.mu * x.sigma) / (y.sigma - x.sigma);
    let step = x.sigma.max(y.sigma);
    let t = if x.sigma > y.sigma { cross - step } else { cross + step };
    OrderVerdict::fail(WitnessKind::Threshold, t, sx(t), sy(t))
}

enum Pair<T> {
    Discrete(DiscreteDist<T>, DiscreteDist<T>),
    Normal(Gauss, Gauss),
}

fn classify<T: Scalar>(x: &Law<T>, y: &Law<T>) -> Result<Pair<T>> {
    if let (Law::Param(ParamDist::Normal { mu: mx, sigma: sx }), Law::Param(ParamDist::Normal { mu: my, sigma: sy })) =
        (x, y)
    {
        return Ok(Pair::Normal(
            Gauss { mu: *mx, sigma: *sx },
            Gauss { mu: *my, sigma: *sy },
        ));
    }
    match (x.to_discrete(), y.to_discrete()) {
        (Some(a), Some(b)) => Ok(Pair::Discrete(a, b)),
        _ => Err(Error::Unsupported(
            "order checks need two finite laws or two normal laws; discretize explicitly first".into(),
        )),
    }
}

fn lift<T: Scalar>(v: OrderVerdict<f64>) -> OrderVerdict<T> {
    v.map(|x| T::from_f64(*x).unwrap_or_else(T::zero))
}

/// Decides `relation` for a pair of laws: exactly when both are finite
/// (Bernoulli and point laws included), in closed form when both are normal.
pub fn check<T: Scalar>(relation: Relation, x: &Law<T>, y: &Law<T>) -> Result<OrderVerdict<T>> {
    Ok(match classify(x, y)? {
        Pair::Discrete(a, b) => match relation {
            Relation::Ssd => check_ssd(&a, &b),
            Relation::Icx => check_icx(&a, &b),
            Relation::Cx => check_cx(&a, &b),
            Relation::St => check_st(&a, &b),
        },
        Pair::Normal(a, b) => lift(match relation {
            Relation::Ssd => normal_ssd(a, b),
            Relation::Icx => normal_icx(a, b),
            Relation::Cx => {
                if (a.mu - b.mu).abs() > NORMAL_MEAN_TOLERANCE {
                    OrderVerdict::fail(WitnessKind::Level, 1.0, a.mu, b.mu)
                } else {
                    normal_ssd(
                        Gauss {
                            mu: b.mu,
                            sigma: a.sigma,
                        },
                        b,
                    )
                }
            }
            Relation::St => normal_st(a, b),
        }),
    })
}
