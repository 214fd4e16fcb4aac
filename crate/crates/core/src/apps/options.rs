//! Protective put in a zero-rate Black–Scholes market.
//!
//! `X_t` is the stock price, `P_t` the put price and `Z_t = P_t - P_0`.
//! With a nonpositive drift `E[Z_t | X_t + Z_t <= x] >= E[P_t] - P_0 >= 0`;
//! both inequalities are verified numerically here.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::special::{normal_cdf, normal_pdf, GaussLegendre};
use crate::verdict::{OrderVerdict, WitnessKind};

/// Nodes of the Gauss–Legendre rule used for every expectation.
pub const QUADRATURE_NODES: usize = 200;
/// Slack on the nonnegativity verdicts, absorbing quadrature error.
pub const QUADRATURE_FLOOR: f64 = -1e-9;

/// Zero-rate put price `K Phi(-d2) - S Phi(-d1)` with time to maturity `tau`.
pub fn black_scholes_put(spot: f64, strike: f64, sigma: f64, tau: f64) -> f64 {
    let vol = sigma * tau.max(0.0).sqrt();
    if vol == 0.0 {
        return (strike - spot).max(0.0);
    }
    let d1 = ((spot / strike).ln() + 0.5 * vol * vol) / vol;
    let d2 = d1 - vol;
    strike * normal_cdf(-d2) - spot * normal_cdf(-d1)
}

/// Zero-rate call price `S Phi(d1) - K Phi(d2)`.
pub fn black_scholes_call(spot: f64, strike: f64, sigma: f64, tau: f64) -> f64 {
    let vol = sigma * tau.max(0.0).sqrt();
    if vol == 0.0 {
        return (spot - strike).max(0.0);
    }
    let d1 = ((spot / strike).ln() + 0.5 * vol * vol) / vol;
    spot * normal_cdf(d1) - strike * normal_cdf(d1 - vol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsParams {
    pub spot: f64,
    pub strike: f64,
    pub sigma: f64,
    /// Real-world return rate; must be `<= 0`.
    pub drift: f64,
    pub horizon: f64,
}

impl BsParams {
    pub fn new(spot: f64, strike: f64, sigma: f64, drift: f64, horizon: f64) -> Result<Self> {
        for (name, v) in [
            ("spot", spot),
            ("strike", strike),
            ("sigma", sigma),
            ("horizon", horizon),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !drift.is_finite() || drift > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "the protective put is an improver only for a nonpositive return rate; got drift {drift}"
            )));
        }
        Ok(Self {
            spot,
            strike,
            sigma,
            drift,
            horizon,
        })
    }

    /// Put price at time `t` when the stock trades at `spot_t`.
    pub fn put(&self, t: f64, spot_t: f64) -> f64 {
        black_scholes_put(spot_t, self.strike, self.sigma, self.horizon - t)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..self.horizon).contains(&t) {
            return Err(Error::LevelOutOfRange(t.to_string(), "[0,T)"));
        }
        Ok(())
    }
}

/// Zero-rate put price at time `t` for spot `spot_t`.
pub fn bs_put(params: &BsParams, t: f64, spot_t: f64) -> Result<f64> {
    params.check_time(t)?;
    Ok(params.put(t, spot_t))
}

/// `X_t`, `P_t` and `X_t + Z_t` as functions of the standard normal
/// generator `g` of `X_t`.
struct Snapshot {
    params: BsParams,
    t: f64,
    p0: f64,
    rule: GaussLegendre,
}

impl Snapshot {
    fn stock(&self, g: f64) -> f64 {
        let p = &self.params;
        p.spot * ((p.drift - 0.5 * p.sigma * p.sigma) * self.t + p.sigma * self.t.sqrt() * g).exp()
    }

    fn put(&self, g: f64) -> f64 {
        self.params.put(self.t, self.stock(g))
    }

    /// `X_t + P_t - P_0`. Below the strike `X_t + P_t` is summed as
    /// `K + C_t` (put-call parity) so that the tiny, accurate call value
    /// carries the variation instead of a cancellation in `X_t + (K - X_t)`.
    fn position(&self, g: f64) -> f64 {
        let p = &self.params;
        let s = self.stock(g);
        let held = if s < p.strike {
            p.strike + black_scholes_call(s, p.strike, p.sigma, p.horizon - self.t)
        } else {
            s + self.put(g)
        };
        held - self.p0
    }

    fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.rule.integrate(-12.0, 12.0, |g| f(g) * normal_pdf(g))
    }

    /// The `g` at which `X_t + Z_t = x`, clamped to `[-40, 40]`.
    fn generator_at(&self, x: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        if self.position(hi) <= x {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.position(mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `E[Z_t | G <= g]`. The normal density decays on a scale `1/|g|`
    /// below a negative `g`, so the window shrinks accordingly.
    fn conditional_gain_below(&self, g: f64) -> f64 {
        let width = if g < -1.0 {
            (40.0 / -g).min(12.0)
        } else {
            12.0 + g.max(0.0)
        };
        let lo = g - width;
        let num = self.rule.integrate(lo, g, |s| (self.put(s) - self.p0) * normal_pdf(s));
        let den = self.rule.integrate(lo, g, normal_pdf);
        num / den
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtectivePutReport {
    pub t: f64,
    pub p0: f64,
    pub expected_put: f64,
    /// `(x, E[Z_t | X_t + Z_t <= x])` for each relevant grid point.
    pub points: Vec<(f64, f64)>,
    /// Grid points at or below the infimum `K - P_0` of `X_t + Z_t`.
    pub skipped: usize,
    /// Threshold witness: the first grid point below the floor.
    pub verdict: OrderVerdict<f64>,
    pub put_decreasing: bool,
    pub position_increasing: bool,
}

impl ProtectivePutReport {
    /// `E[P_t] >= P_0` and the conditional gains are nonnegative, both up
    /// to the quadrature floor.
    pub fn holds(&self) -> bool {
        self.verdict.holds() && self.expected_put - self.p0 >= QUADRATURE_FLOOR
    }

    pub fn to_json(&self) -> Value {
        json!({
            "t": self.t,
            "p0": self.p0,
            "expected_put": self.expected_put,
            "holds": self.holds(),
            "conditional": self.verdict.to_json(),
            "grid": self.points.iter().map(|(x, v)| json!([x, v])).collect::<Vec<_>>(),
            "skipped": self.skipped,
            "put_decreasing": self.put_decreasing,
            "position_increasing": self.position_increasing,
        })
    }
}

/// Default grid: 101 points over the mean plus or minus five standard
/// deviations of `X_t + Z_t`.
pub fn protective_put_check(params: &BsParams, t: f64, x_grid: Option<&[f64]>) -> Result<ProtectivePutReport> {
    params.check_time(t)?;
    let p0 = params.put(0.0, params.spot);
    let snap = Snapshot {
        params: *params,
        t,
        p0,
        rule: GaussLegendre::new(QUADRATURE_NODES),
    };
    if t == 0.0 {
        return Ok(ProtectivePutReport {
            t,
            p0,
            expected_put: p0,
            points: Vec::new(),
            skipped: 0,
            verdict: OrderVerdict::pass(),
            put_decreasing: true,
            position_increasing: true,
        });
    }
    let expected_put = snap.expect(|g| snap.put(g));
    let grid: Vec<f64> = match x_grid {
        Some(g) => g.to_vec(),
        None => {
            let mean = snap.expect(|g| snap.position(g));
            let var = snap.expect(|g| (snap.position(g) - mean).powi(2));
            let sd = var.sqrt();
            (0..=100).map(|k| mean - 5.0 * sd + sd * k as f64 / 10.0).collect()
        }
    };
    let infimum = params.strike - p0;
    let mut points = Vec::with_capacity(grid.len());
    let mut verdict = OrderVerdict::pass();
    for &x in &grid {
        if x <= infimum {
            continue;
        }
        let v = snap.conditional_gain_below(snap.generator_at(x));
        if verdict.holds() && v < QUADRATURE_FLOOR {
            verdict = OrderVerdict::fail(WitnessKind::Threshold, x, v, 0.0);
        }
        points.push((x, v));
    }
    let gs: Vec<f64> = (-60..=60).map(|k| k as f64 / 10.0).collect();
    let put_decreasing = gs.windows(2).all(|w| snap.put(w[1]) <= snap.put(w[0]));
    // Deep in the money `K + C_t` rounds to `K`, so only the weak inequality
    // is decidable.
    let position_increasing = gs.windows(2).all(|w| snap.position(w[1]) >= snap.position(w[0]));
    Ok(ProtectivePutReport {
        t,
        p0,
        expected_put,
        skipped: grid.len() - points.len(),
        points,
        verdict,
        put_decreasing,
        position_increasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> BsParams {
        BsParams::new(1.0, 1.0, 0.2, -0.05, 1.0).unwrap()
    }

    #[test]
    fn closed_form_put() {
        let p = black_scholes_put(1.0, 1.0, 0.2, 1.0);
        assert!((p - 0.079656).abs() < 1e-6, "{p}");
        assert!((black_scholes_put(0.8, 1.0, 1e-8, 1.0) - 0.2).abs() < 1e-12);
        assert_eq!(black_scholes_put(1.3, 1.0, 1e-8, 1.0), 0.0);
        // Put-call parity at zero rate.
        let c = black_scholes_call(1.1, 1.0, 0.3, 0.5);
        assert!((c - black_scholes_put(1.1, 1.0, 0.3, 0.5) - 0.1).abs() < 1e-15);
        // Risk-neutral payoff quadrature; the payoff vanishes above g = 0.1.
        let rule = GaussLegendre::new(QUADRATURE_NODES);
        let q = rule.integrate(-12.0, 0.1, |g| (1.0 - (-0.02 + 0.2 * g).exp()) * normal_pdf(g));
        assert!((p - q).abs() < 1e-6);
    }

    #[test]
    fn example_holds_at_mid_horizon() {
        let r = protective_put_check(&example(), 0.5, None).unwrap();
        assert!(r.holds(), "{:?}", r.verdict);
        assert!(r.put_decreasing && r.position_increasing);
        assert!(r.points.len() + r.skipped == 101);
        assert!(r.expected_put >= r.p0);
    }

    #[test]
    fn positive_drift_is_rejected() {
        let err = BsParams::new(1.0, 1.0, 0.2, 0.05, 1.0).unwrap_err();
        assert!(err.to_string().contains("nonpositive return"));
    }

    #[test]
    fn time_must_precede_maturity() {
        assert!(bs_put(&example(), 1.0, 1.0).is_err());
        assert!(protective_put_check(&example(), 0.0, None).unwrap().holds());
    }
}
