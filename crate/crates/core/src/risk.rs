//! Expected Shortfall, the envelope `p -> (1-p) ES_p(X)`, stop-loss
//! premiums and level regularity.
//!
//! For a finite law the envelope is piecewise linear with breakpoints at the
//! cumulative probabilities `F(x_1) < ... < F(x_n) = 1`; on the piece ending
//! at `F(x_k)` its slope is `-x_k`, the right quantile there. Every discrete
//! ES value is read off this envelope, so all levels are served exactly from
//! one `O(n)` construction.

use crate::dist::{DiscreteDist, ParamDist};
use crate::error::{Error, Result};
use crate::scalar::{complement, Scalar};
use crate::special::{normal_cdf, normal_pdf, normal_quantile};

/// Breakpoints `(p, (1-p) ES_p)` of a finite law, from `(0, mean)` to `(1, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiEnvelope<T> {
    breakpoints: Vec<(T, T)>,
}

impl<T: Scalar> PhiEnvelope<T> {
    pub fn new(d: &DiscreteDist<T>) -> Self {
        let n = d.len();
        // tail[k] = sum_{i >= k} x_i p_i
        let mut tail = vec![T::zero(); n + 1];
        for (k, (x, p)) in d.atoms().iter().enumerate().rev() {
            tail[k] = tail[k + 1].clone() + x.clone() * p.clone();
        }
        let mut breakpoints = Vec::with_capacity(n + 1);
        breakpoints.push((T::zero(), tail[0].clone()));
        for (k, cum) in d.cumulative().into_iter().enumerate() {
            breakpoints.push((cum, tail[k + 1].clone()));
        }
        // Pin the right end; float sums can land a hair off one.
        if let Some(last) = breakpoints.last_mut() {
            *last = (T::one(), T::zero());
        }
        Self { breakpoints }
    }

    pub fn breakpoints(&self) -> &[(T, T)] {
        &self.breakpoints
    }

    /// Breakpoint levels, `0` and `1` included.
    pub fn levels(&self) -> impl Iterator<Item = &T> + '_ {
        self.breakpoints.iter().map(|(p, _)| p)
    }

    /// Slope on each piece, in order; equals minus the quantile on that piece.
    pub fn slopes(&self) -> Vec<T> {
        self.breakpoints
            .windows(2)
            .map(|w| (w[1].1.clone() - w[0].1.clone()) / (w[1].0.clone() - w[0].0.clone()))
            .collect()
    }

    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|s| s[1] <= s[0])
    }

    /// Values at an ascending list of levels in `[0,1]`, in one pass.
    pub fn eval_sorted(&self, levels: &[T]) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(levels.len());
        let mut piece = 0;
        let last = self.breakpoints.len() - 2;
        for p in levels {
            if p.is_negative() || *p > T::one() {
                return Err(Error::LevelOutOfRange(p.to_string(), "[0,1]"));
            }
            while piece < last && *p > self.breakpoints[piece + 1].0 {
                piece += 1;
            }
            let (p0, v0) = &self.breakpoints[piece];
            let (p1, v1) = &self.breakpoints[piece + 1];
            let slope = (v1.clone() - v0.clone()) / (p1.clone() - p0.clone());
            out.push(v0.clone() + slope * (p.clone() - p0.clone()));
        }
        Ok(out)
    }

    pub fn eval(&self, p: &T) -> Result<T> {
        if p.is_negative() || *p > T::one() {
            return Err(Error::LevelOutOfRange(p.to_string(), "[0,1]"));
        }
        for w in self.breakpoints.windows(2) {
            let (p0, v0) = &w[0];
            let (p1, v1) = &w[1];
            if p <= p1 {
                let slope = (v1.clone() - v0.clone()) / (p1.clone() - p0.clone());
                return Ok(v0.clone() + slope * (p.clone() - p0.clone()));
            }
        }
        Ok(T::zero())
    }
}

impl<T: Scalar> DiscreteDist<T> {
    pub fn phi_envelope(&self) -> PhiEnvelope<T> {
        PhiEnvelope::new(self)
    }

    /// `(1-p) ES_p(X)` on `[0,1)`, and `0` at `p = 1`.
    pub fn phi(&self, p: &T) -> Result<T> {
        self.phi_envelope().eval(p)
    }

    /// `ES_p(X) = (1/(1-p)) ∫_p^1 Q_X(t) dt` for `p` in `[0, 1)`.
    pub fn es(&self, p: &T) -> Result<T> {
        if p.is_negative() || *p >= T::one() {
            return Err(Error::LevelOutOfRange(p.to_string(), "[0,1)"));
        }
        Ok(self.phi(p)? / complement(p))
    }

    /// `∫_0^p Q_X(t) dt`, the integrated quantile (Lorenz-type) curve.
    pub fn integrated_quantile(&self, p: &T) -> Result<T> {
        Ok(self.mean() - self.phi(p)?)
    }

    /// Stop-loss premium `E[(X - d)+]`.
    pub fn stop_loss(&self, deductible: &T) -> T {
        self.expect(|x| (x.clone() - deductible.clone()).positive_part())
    }

    /// `E[min(X, t)]`.
    pub fn angle(&self, t: &T) -> T {
        self.expect(|x| T::min_of(x.clone(), t.clone()))
    }

    /// `(F(t), E[X; X <= t])` at each `t` of an ascending list, in one pass.
    fn lower_partial_sums(&self, ts: &[T]) -> Vec<(T, T)> {
        let mut out = Vec::with_capacity(ts.len());
        let (mut mass, mut first) = (T::zero(), T::zero());
        let mut atoms = self.atoms().iter().peekable();
        for t in ts {
            while let Some((x, p)) = atoms.peek() {
                if x > t {
                    break;
                }
                mass = mass + p.clone();
                first = first + x.clone() * p.clone();
                atoms.next();
            }
            out.push((mass.clone(), first.clone()));
        }
        out
    }

    /// `E[min(X, t)]` at each `t` of an ascending list.
    pub fn angle_curve(&self, ts: &[T]) -> Vec<T> {
        self.lower_partial_sums(ts)
            .into_iter()
            .zip(ts)
            .map(|((mass, first), t)| first + t.clone() * complement(&mass))
            .collect()
    }

    /// `E[(X - t)+]` at each `t` of an ascending list.
    pub fn stop_loss_curve(&self, ts: &[T]) -> Vec<T> {
        let mean = self.mean();
        self.lower_partial_sums(ts)
            .into_iter()
            .zip(ts)
            .map(|((mass, first), t)| mean.clone() - first - t.clone() * complement(&mass))
            .collect()
    }

    /// `P(X > t)` at each `t` of an ascending list.
    pub fn survival_curve(&self, ts: &[T]) -> Vec<T> {
        self.lower_partial_sums(ts)
            .into_iter()
            .map(|(mass, _)| complement(&mass))
            .collect()
    }

    /// Whether `P(X < Q_X(p)) = p`, i.e. the level sits exactly at the start
    /// of a quantile step. At such levels `ES_p` is a conditional tail mean.
    pub fn is_regular_level(&self, p: &T) -> Result<bool> {
        let q = self.quantile_right(p)?;
        Ok(self.prob_below(&q) == *p)
    }

    /// `E[X | X >= Q_X(p)]`.
    pub fn tail_mean_at_level(&self, p: &T) -> Result<T> {
        let q = self.quantile_right(p)?;
        self.upper_tail_mean(&q)
    }
}

fn check_es_level(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(p.to_string(), "[0,1)"))
    }
}

impl ParamDist {
    /// `(1-p) ES_p` in closed form; `phi(1) = 0`.
    pub fn phi(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::LevelOutOfRange(p.to_string(), "[0,1]"));
        }
        if p == 1.0 {
            return Ok(0.0);
        }
        if p == 0.0 {
            return Ok(self.mean());
        }
        Ok(match *self {
            ParamDist::Normal { mu, sigma } => (1.0 - p) * mu + sigma * normal_pdf(normal_quantile(p)),
            ParamDist::Exponential { rate } => (1.0 - p) * (1.0 - (-p).ln_1p()) / rate,
            ParamDist::LogNormal { sigma, .. } => self.mean() * normal_cdf(sigma - normal_quantile(p)),
            ParamDist::Bernoulli { .. } | ParamDist::PointMass { .. } => {
                self.as_discrete().expect("atomic kind").phi(&p)?
            }
        })
    }

    /// Expected Shortfall at level `p` in `[0,1)`.
    pub fn es(&self, p: f64) -> Result<f64> {
        check_es_level(p)?;
        Ok(match *self {
            ParamDist::Normal { mu, sigma } if p > 0.0 => mu + sigma * normal_pdf(normal_quantile(p)) / (1.0 - p),
            ParamDist::Exponential { rate } => (1.0 - (-p).ln_1p()) / rate,
            _ => self.phi(p)? / (1.0 - p),
        })
    }

    pub fn integrated_quantile(&self, p: f64) -> Result<f64> {
        Ok(self.mean() - self.phi(p)?)
    }

    /// `E[(X - d)+]`.
    pub fn stop_loss(&self, d: f64) -> f64 {
        match *self {
            ParamDist::Normal { mu, sigma } => {
                let z = (mu - d) / sigma;
                (mu - d) * normal_cdf(z) + sigma * normal_pdf(z)
            }
            ParamDist::Exponential { rate } => {
                if d >= 0.0 {
                    (-rate * d).exp() / rate
                } else {
                    1.0 / rate - d
                }
            }
            ParamDist::LogNormal { mu, sigma } => {
                if d <= 0.0 {
                    return self.mean() - d;
                }
                let d1 = (mu + sigma * sigma - d.ln()) / sigma;
                self.mean() * normal_cdf(d1) - d * normal_cdf(d1 - sigma)
            }
            ParamDist::Bernoulli { .. } | ParamDist::PointMass { .. } => {
                self.as_discrete().expect("atomic kind").stop_loss(&d)
            }
        }
    }

    /// `E[min(X, t)] = t - E[(t - X)+] = E[X] - E[(X - t)+]`.
    pub fn angle(&self, t: f64) -> f64 {
        self.mean() - self.stop_loss(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::GaussLegendre;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn int(n: i64) -> Rational {
        q(n, 1)
    }

    /// Independent route: integrate the right quantile over `(p, 1)` with
    /// the trapezoid rule on `10^4` nodes after the substitution
    /// `t = 1 - (1-p) s^2`, which tames the endpoint singularity.
    fn es_by_trapezoid(d: &ParamDist, p: f64) -> f64 {
        let n = 10_000;
        let h = 1.0 / n as f64;
        let f = |s: f64| {
            if s == 0.0 {
                return 0.0;
            }
            let t = 1.0 - (1.0 - p) * s * s;
            d.quantile_right(t.min(1.0 - 1e-300).max(p)).unwrap_or(0.0) * 2.0 * s
        };
        let mut acc = 0.5 * (f(0.0) + f(1.0));
        for i in 1..n {
            acc += f(i as f64 * h);
        }
        acc * h
    }

    #[test]
    fn discrete_es_examples() {
        let d = DiscreteDist::uniform((0..4).map(int)).unwrap();
        assert_eq!(d.es(&q(1, 2)).unwrap(), q(5, 2));
        assert_eq!(d.es(&int(0)).unwrap(), d.mean());
        assert!(d.es(&int(1)).is_err());
        assert!(d.es(&int(-1)).is_err());
    }

    #[test]
    fn normal_es_example() {
        let n = ParamDist::normal(0.0, 1.0).unwrap();
        let es = n.es(0.975).unwrap();
        assert!((es - 2.337_803).abs() < 1e-6, "{es}");
        assert!((es - es_by_trapezoid(&n, 0.975)).abs() < 1e-7);
        assert_eq!(n.es(0.0).unwrap(), 0.0);
    }

    #[test]
    fn parametric_es_matches_trapezoid_integration() {
        let laws = [
            ParamDist::normal(0.5, 2.0).unwrap(),
            ParamDist::exponential(1.5).unwrap(),
            ParamDist::lognormal(0.0, 0.2).unwrap(),
        ];
        for d in &laws {
            for &p in &[0.1, 0.5, 0.9, 0.99] {
                let closed = d.es(p).unwrap();
                let numeric = es_by_trapezoid(d, p);
                assert!(
                    (closed - numeric).abs() < 1e-7 * closed.abs().max(1.0),
                    "{d:?} p={p}: {closed} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn envelope_of_point_mass_is_a_line() {
        let d = DiscreteDist::point(int(3));
        assert_eq!(d.phi_envelope().breakpoints(), &[(int(0), int(3)), (int(1), int(0))]);
        assert_eq!(d.phi(&q(1, 3)).unwrap(), int(2));
    }

    #[test]
    fn envelope_of_two_point_uniform() {
        let d = DiscreteDist::uniform(vec![int(0), int(1)]).unwrap();
        let env = d.phi_envelope();
        assert_eq!(
            env.breakpoints(),
            &[(int(0), q(1, 2)), (q(1, 2), q(1, 2)), (int(1), int(0))]
        );
        assert_eq!(env.slopes(), vec![int(0), int(-1)]);
        assert!(env.is_concave());
    }

    #[test]
    fn envelope_differences_integrate_the_quantile() {
        let d = DiscreteDist::normalize(vec![(int(-2), q(1, 5)), (int(1), q(1, 2)), (int(4), q(3, 10))]).unwrap();
        let (lo, hi) = (q(1, 10), q(3, 5));
        // ∫_{1/10}^{3/5} Q = (1/5 - 1/10)(-2) + (3/5 - 1/5)(1)
        let integral = q(1, 10) * int(-2) + q(2, 5);
        assert_eq!(d.phi(&hi).unwrap() - d.phi(&lo).unwrap(), -integral);
    }

    #[test]
    fn stop_loss_examples() {
        let e = ParamDist::exponential(1.0).unwrap();
        assert_eq!(e.stop_loss(0.0), 1.0);
        assert!((e.stop_loss(1.0) - 0.367_879_441_171_442_3).abs() < 1e-15);
        let d = DiscreteDist::uniform(vec![int(0), int(2)]).unwrap();
        assert_eq!(d.stop_loss(&int(1)), q(1, 2));
        let n = ParamDist::normal(0.0, 1.0).unwrap();
        assert!((n.stop_loss(0.0) - normal_pdf(0.0)).abs() < 1e-16);
    }

    #[test]
    fn lognormal_stop_loss_matches_quadrature() {
        let ln = ParamDist::lognormal(0.0, 0.2).unwrap();
        let rule = GaussLegendre::new(200);
        for &d in &[0.5f64, 1.0, 1.3] {
            let zd = d.ln() / 0.2;
            let numeric = rule.integrate(zd, 14.0, |g| ((0.2 * g).exp() - d) * normal_pdf(g));
            assert!((ln.stop_loss(d) - numeric).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn regular_levels() {
        let d = DiscreteDist::uniform(vec![int(0), int(1)]).unwrap();
        assert!(d.is_regular_level(&q(1, 2)).unwrap());
        assert_eq!(d.tail_mean_at_level(&q(1, 2)).unwrap(), int(1));
        assert_eq!(d.es(&q(1, 2)).unwrap(), int(1));
        assert!(!d.is_regular_level(&q(1, 4)).unwrap());

        let c = DiscreteDist::point(int(7));
        assert!(!c.is_regular_level(&q(1, 3)).unwrap());
        assert_eq!(c.tail_mean_at_level(&q(1, 3)).unwrap(), int(7));
    }
}
