//! JSON forms of laws, joints and indemnity schedules.
//!
//! ```text
//! {"type":"discrete","atoms":[{"x":0,"p":"1/4"}, ...]}
//! {"type":"normal","mu":0.0,"sigma":1.0}   exponential(rate), bernoulli(q),
//!                                          lognormal(mu, sigma), point(c)
//! {"type":"joint","atoms":[{"w":0,"z":"-1/2","p":"1/4"}, ...]}
//! {"type":"fixed","threshold":1,"amount":1}
//! {"type":"stop_loss","deductible":2}
//! {"type":"piecewise_linear","knots":[[0,0],[2,1]]}
//! ```
//!
//! Scalars may be JSON numbers or strings (`"7/12"`, `"0.25"`, `"1e-3"`).
//! Exact scalars read numbers through their decimal text, so `0.1` is `1/10`.
//! Errors name the offending location.

use serde_json::{json, Map, Value};

use crate::apps::IndemnitySchedule;
use crate::dist::{DiscreteDist, JointDist, Law, ParamDist};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn bad(at: &str, what: impl std::fmt::Display) -> Error {
    Error::Input(format!("{at}: {what}"))
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(at, "expected an object"))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| bad(at, format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(at, "expected an array"))
}

fn type_tag<'a>(o: &'a Map<String, Value>, at: &str) -> Result<&'a str> {
    field(o, "type", at)?
        .as_str()
        .ok_or_else(|| bad(&format!("{at}.type"), "expected a string"))
}

/// A scalar given as a JSON number or string.
pub fn parse_scalar<T: Scalar>(v: &Value, at: &str) -> Result<T> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(bad(at, "expected a number or a numeric string")),
    };
    let x = T::parse_literal(&text).ok_or_else(|| bad(at, format!("cannot parse \"{text}\"")))?;
    if !x.is_comparable() {
        return Err(bad(at, "NaN is not allowed"));
    }
    Ok(x)
}

fn parse_f64(o: &Map<String, Value>, key: &str, at: &str) -> Result<f64> {
    let loc = format!("{at}.{key}");
    let x: f64 = parse_scalar(field(o, key, at)?, &loc)?;
    if !x.is_finite() {
        return Err(bad(&loc, "must be finite"));
    }
    Ok(x)
}

fn located<T>(r: Result<T>, at: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Input(_) => e,
        other => bad(at, other),
    })
}

pub fn parse_discrete<T: Scalar>(v: &Value) -> Result<DiscreteDist<T>> {
    let o = object(v, "$")?;
    let tag = type_tag(o, "$")?;
    if tag != "discrete" {
        return Err(bad("$.type", format!("expected \"discrete\", got \"{tag}\"")));
    }
    let atoms = array(field(o, "atoms", "$")?, "$.atoms")?;
    let mut raw = Vec::with_capacity(atoms.len());
    for (k, a) in atoms.iter().enumerate() {
        let at = format!("$.atoms[{k}]");
        let a = object(a, &at)?;
        let x = parse_scalar(field(a, "x", &at)?, &format!("{at}.x"))?;
        let p = parse_scalar(field(a, "p", &at)?, &format!("{at}.p"))?;
        raw.push((x, p));
    }
    located(DiscreteDist::normalize(raw), "$.atoms")
}

pub fn parse_param(v: &Value) -> Result<ParamDist> {
    let o = object(v, "$")?;
    let d = match type_tag(o, "$")? {
        "normal" => ParamDist::normal(parse_f64(o, "mu", "$")?, parse_f64(o, "sigma", "$")?),
        "exponential" => ParamDist::exponential(parse_f64(o, "rate", "$")?),
        "bernoulli" => ParamDist::bernoulli(parse_f64(o, "q", "$")?),
        "lognormal" => ParamDist::lognormal(parse_f64(o, "mu", "$")?, parse_f64(o, "sigma", "$")?),
        "point" => ParamDist::point(parse_f64(o, "c", "$")?),
        other => return Err(bad("$.type", format!("unknown law type \"{other}\""))),
    };
    located(d, "$")
}

pub fn parse_law<T: Scalar>(v: &Value) -> Result<Law<T>> {
    let o = object(v, "$")?;
    match type_tag(o, "$")? {
        "discrete" => Ok(Law::Discrete(parse_discrete(v)?)),
        _ => Ok(Law::Param(parse_param(v)?)),
    }
}

pub fn parse_joint<T: Scalar>(v: &Value) -> Result<JointDist<T>> {
    let o = object(v, "$")?;
    let tag = type_tag(o, "$")?;
    if tag != "joint" {
        return Err(bad("$.type", format!("expected \"joint\", got \"{tag}\"")));
    }
    let atoms = array(field(o, "atoms", "$")?, "$.atoms")?;
    let mut raw = Vec::with_capacity(atoms.len());
    for (k, a) in atoms.iter().enumerate() {
        let at = format!("$.atoms[{k}]");
        let a = object(a, &at)?;
        let w = parse_scalar(field(a, "w", &at)?, &format!("{at}.w"))?;
        let z = parse_scalar(field(a, "z", &at)?, &format!("{at}.z"))?;
        let p = parse_scalar(field(a, "p", &at)?, &format!("{at}.p"))?;
        raw.push((w, z, p));
    }
    located(JointDist::from_triples(raw), "$.atoms")
}

pub fn parse_indemnity<T: Scalar>(v: &Value) -> Result<IndemnitySchedule<T>> {
    let o = object(v, "$")?;
    let s = |key: &str| -> Result<T> { parse_scalar(field(o, key, "$")?, &format!("$.{key}")) };
    let i = match type_tag(o, "$")? {
        "fixed" => IndemnitySchedule::fixed(s("threshold")?, s("amount")?),
        "stop_loss" => IndemnitySchedule::stop_loss(s("deductible")?),
        "piecewise_linear" => {
            let knots = array(field(o, "knots", "$")?, "$.knots")?;
            let mut out = Vec::with_capacity(knots.len());
            for (k, pair) in knots.iter().enumerate() {
                let at = format!("$.knots[{k}]");
                match array(pair, &at)?.as_slice() {
                    [x, y] => out.push((
                        parse_scalar(x, &format!("{at}[0]"))?,
                        parse_scalar(y, &format!("{at}[1]"))?,
                    )),
                    _ => return Err(bad(&at, "expected [x, I(x)]")),
                }
            }
            IndemnitySchedule::piecewise_linear(out)
        }
        other => return Err(bad("$.type", format!("unknown indemnity type \"{other}\""))),
    };
    located(i, "$")
}

pub fn discrete_to_json<T: Scalar>(d: &DiscreteDist<T>) -> Value {
    json!({
        "type": "discrete",
        "atoms": d.atoms().iter().map(|(x, p)| json!({"x": x.to_json(), "p": p.to_json()})).collect::<Vec<_>>(),
    })
}

pub fn param_to_json(d: &ParamDist) -> Value {
    match *d {
        ParamDist::Normal { mu, sigma } => json!({"type": "normal", "mu": mu, "sigma": sigma}),
        ParamDist::Exponential { rate } => json!({"type": "exponential", "rate": rate}),
        ParamDist::Bernoulli { q } => json!({"type": "bernoulli", "q": q}),
        ParamDist::LogNormal { mu, sigma } => json!({"type": "lognormal", "mu": mu, "sigma": sigma}),
        ParamDist::PointMass { c } => json!({"type": "point", "c": c}),
    }
}

pub fn law_to_json<T: Scalar>(d: &Law<T>) -> Value {
    match d {
        Law::Discrete(d) => discrete_to_json(d),
        Law::Param(p) => param_to_json(p),
    }
}

pub fn joint_to_json<T: Scalar>(j: &JointDist<T>) -> Value {
    json!({
        "type": "joint",
        "atoms": j
            .atoms()
            .iter()
            .map(|a| json!({"w": a.w.to_json(), "z": a.z.to_json(), "p": a.p.to_json()}))
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn discrete_round_trip() {
        let v: Value =
            serde_json::from_str(r#"{"type":"discrete","atoms":[{"x":0.1,"p":"1/4"},{"x":"-2","p":"3/4"}]}"#).unwrap();
        let d: DiscreteDist<Rational> = parse_discrete(&v).unwrap();
        assert_eq!(d.atoms(), &[(q(-2, 1), q(3, 4)), (q(1, 10), q(1, 4))]);
        assert_eq!(parse_discrete::<Rational>(&discrete_to_json(&d)).unwrap(), d);
    }

    #[test]
    fn joint_round_trip() {
        let v: Value =
            serde_json::from_str(r#"{"type":"joint","atoms":[{"w":0,"z":"-1/2","p":1},{"w":1,"z":0.5,"p":1}]}"#)
                .unwrap();
        let j: JointDist<Rational> = parse_joint(&v).unwrap();
        assert_eq!(j.mean_z(), q(0, 1));
        assert_eq!(parse_joint::<Rational>(&joint_to_json(&j)).unwrap(), j);
    }

    #[test]
    fn parametric_laws() {
        let v: Value = serde_json::from_str(r#"{"type":"normal","mu":0.0,"sigma":1.0}"#).unwrap();
        let d = parse_param(&v).unwrap();
        assert_eq!(d, ParamDist::Normal { mu: 0.0, sigma: 1.0 });
        assert_eq!(parse_param(&param_to_json(&d)).unwrap(), d);
        let bad_sigma: Value = serde_json::from_str(r#"{"type":"normal","mu":0.0,"sigma":-1}"#).unwrap();
        assert!(matches!(parse_param(&bad_sigma), Err(Error::Input(_))));
    }

    #[test]
    fn errors_carry_locations() {
        let v: Value =
            serde_json::from_str(r#"{"type":"discrete","atoms":[{"x":0,"p":"1/4"},{"x":1,"p":"x/2"}]}"#).unwrap();
        let err = parse_discrete::<Rational>(&v).unwrap_err().to_string();
        assert!(err.contains("$.atoms[1].p"), "{err}");
        let v: Value = serde_json::from_str(r#"{"type":"discrete","atoms":[{"x":0,"p":"-1/4"}]}"#).unwrap();
        assert!(parse_discrete::<Rational>(&v).is_err());
        let v: Value = serde_json::from_str(r#"{"type":"mystery"}"#).unwrap();
        assert!(parse_law::<Rational>(&v).is_err());
    }

    #[test]
    fn indemnities() {
        let v: Value = serde_json::from_str(r#"{"type":"piecewise_linear","knots":[[0,0],[2,1]]}"#).unwrap();
        let i: IndemnitySchedule<Rational> = parse_indemnity(&v).unwrap();
        assert_eq!(i.eval(&q(1, 1)), q(1, 2));
        assert_eq!(parse_indemnity::<Rational>(&i.to_json()).unwrap(), i);
        let v: Value = serde_json::from_str(r#"{"type":"fixed","threshold":1,"amount":2}"#).unwrap();
        assert!(parse_indemnity::<Rational>(&v).is_err());
    }
}
