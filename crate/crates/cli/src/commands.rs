//! One handler per subcommand.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde_json::{json, Value};
use stochorder::apps::{
    bernoulli_grid, bernoulli_region, gaussian_grid, gaussian_region, improver_check, indifference_premium,
    marketable_check, protective_put_check, stop_loss_compare, BsParams, IndemnitySchedule, Utility,
};
use stochorder::json::{discrete_to_json, joint_to_json, law_to_json, parse_indemnity, parse_joint, parse_law};
use stochorder::random::{generator, random_centred_joint, random_joint};
use stochorder::{
    check, check_ssd, cond_classic, cond_cx_pair, cond_icx, cond_new, cond_theorem2, synthesize, verify_coupling,
    DiscreteDist, JointDist, Law, Mode, OrderVerdict, Rational, Relation, Scalar, SynthOptions, SynthResult,
};

use crate::report::{Failure, Outcome};

type Run = Result<Outcome, Failure>;

/// Overrides the coupling support guard. At your own risk: the simplex is
/// exact and its cost grows quickly with the support.
pub const MAX_SUPPORT_VAR: &str = "STOCHORDER_MAX_SUPPORT";

/// `-` reads stdin.
fn read_json(path: &Path) -> Result<Value, Failure> {
    let name = path.display().to_string();
    let text = if name == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        fs::read_to_string(path)
    }
    .map_err(|e| Failure::input(format!("{name}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{name}: {e}")))
}

fn load<T>(path: &Path, parse: impl Fn(&Value) -> stochorder::Result<T>) -> Result<T, Failure> {
    let v = read_json(path)?;
    parse(&v).map_err(|e| Failure::from(e).at(&path.display().to_string()))
}

fn load_law(path: &Path) -> Result<Law<Rational>, Failure> {
    load(path, parse_law::<Rational>)
}

fn load_joint(path: &Path) -> Result<JointDist<Rational>, Failure> {
    load(path, parse_joint::<Rational>)
}

fn finite(law: &Law<Rational>, path: &Path) -> Result<DiscreteDist<Rational>, Failure> {
    law.to_discrete().ok_or_else(|| {
        Failure::input(format!(
            "{}: a finite law is required here; convert it with `discretize` first",
            path.display()
        ))
    })
}

fn scalar(text: &str, what: &str) -> Result<Rational, Failure> {
    Rational::parse_literal(text).ok_or_else(|| Failure::input(format!("{what}: cannot parse \"{text}\"")))
}

fn write_out(path: Option<&Path>, v: &Value) -> Result<(), Failure> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(v).expect("serializable");
        fs::write(p, text + "\n").map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::Ssd => "ssd",
        Relation::Icx => "icx",
        Relation::Cx => "cx",
        Relation::St => "st",
    }
}

pub fn check_order(relation: Relation, x_path: &Path, y_path: &Path) -> Run {
    let x = load_law(x_path)?;
    let y = load_law(y_path)?;
    let v = check(relation, &x, &y)?;
    let name = relation_name(relation);
    Ok(Outcome::verdict(
        v.holds(),
        json!({"relation": name, "x": law_to_json(&x), "y": law_to_json(&y)}),
        v.to_json(),
        format!("{name}: {v}"),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    New,
    Classic,
    Icx,
    Cx,
    Thm2,
}

impl Condition {
    fn name(self) -> &'static str {
        match self {
            Condition::New => "new",
            Condition::Classic => "classic",
            Condition::Icx => "icx",
            Condition::Cx => "cx",
            Condition::Thm2 => "thm2",
        }
    }
}

pub fn check_cond(which: Condition, path: &Path) -> Run {
    let j = load_joint(path)?;
    let v = match which {
        Condition::New => cond_new(&j),
        Condition::Classic => cond_classic(&j),
        Condition::Icx => cond_icx(&j),
        Condition::Cx => cond_cx_pair(&j),
        Condition::Thm2 => cond_theorem2(&j),
    };
    Ok(Outcome::verdict(
        v.holds(),
        json!({"which": which.name(), "joint": joint_to_json(&j)}),
        v.to_json(),
        format!("{}: {v}", which.name()),
    ))
}

fn max_support() -> Result<usize, Failure> {
    match std::env::var(MAX_SUPPORT_VAR) {
        Err(_) => Ok(SynthOptions::default().max_support),
        Ok(s) => {
            let n: usize = s
                .trim()
                .parse()
                .map_err(|_| Failure::input(format!("{MAX_SUPPORT_VAR}: expected a positive integer, got \"{s}\"")))?;
            if n == 0 {
                return Err(Failure::input(format!("{MAX_SUPPORT_VAR} must be positive")));
            }
            log::warn!("{MAX_SUPPORT_VAR}={n} overrides the default support limit");
            Ok(n)
        }
    }
}

pub fn synthesize_cmd(mode: Mode, x_path: &Path, y_path: &Path, out: Option<&Path>) -> Run {
    let (xl, yl) = (load_law(x_path)?, load_law(y_path)?);
    let (x, y) = (finite(&xl, x_path)?, finite(&yl, y_path)?);
    let options = SynthOptions {
        max_support: max_support()?,
    };
    let inputs = json!({"mode": mode.to_string(), "x": discrete_to_json(&x), "y": discrete_to_json(&y)});
    match synthesize(&x, &y, mode, options)? {
        SynthResult::Feasible(c) => {
            if !verify_coupling(&c, &x, &y, mode) {
                return Err(Failure::Internal(format!("{mode} coupling failed re-verification")));
            }
            let joint = joint_to_json(&c.to_joint());
            write_out(out, &joint)?;
            Ok(Outcome::verdict(
                true,
                inputs,
                json!({"feasible": true, "verified": true, "coupling": joint}),
                format!(
                    "{mode} coupling found on {} x {} atoms and verified",
                    c.rows.len(),
                    c.cols.len()
                ),
            ))
        }
        SynthResult::Infeasible(v) => Ok(Outcome::verdict(
            false,
            inputs,
            json!({"feasible": false, "certificate": v.to_json()}),
            format!("no {mode} coupling: order {v}"),
        )),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Gaussian,
    Bernoulli,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

fn bit(b: bool) -> u8 {
    b as u8
}

pub fn table(kind: TableKind, format: Format, grid: &str) -> Run {
    if grid != "default" {
        return Err(Failure::input(format!(
            "--grid: only \"default\" is available, got \"{grid}\""
        )));
    }
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match kind {
        TableKind::Bernoulli => {
            let mut rows = Vec::new();
            for case in bernoulli_grid() {
                let r = bernoulli_region(&case)?;
                rows.push(vec![
                    case.c.to_f64_lossy().to_string(),
                    case.rho.to_f64_lossy().to_string(),
                    bit(r.ssd).to_string(),
                    bit(r.cond_new).to_string(),
                    bit(r.cond_classic).to_string(),
                ]);
            }
            (vec!["c", "rho", "ssd", "new", "classic"], rows)
        }
        TableKind::Gaussian => {
            let rows = gaussian_grid()
                .iter()
                .map(|case| {
                    let r = gaussian_region(case);
                    vec![
                        case.mu_z.to_string(),
                        case.sigma_z.to_string(),
                        case.rho.to_string(),
                        bit(r.ssd).to_string(),
                        bit(r.cond_new).to_string(),
                        bit(r.cond_classic).to_string(),
                    ]
                })
                .collect();
            (vec!["mu_z", "sigma_z", "rho", "ssd", "new", "classic"], rows)
        }
    };
    let name = match kind {
        TableKind::Gaussian => "gaussian",
        TableKind::Bernoulli => "bernoulli",
    };
    let text = match format {
        Format::Json => None,
        Format::Csv => {
            let mut s = header.join(",") + "\n";
            for r in &rows {
                s += &(r.join(",") + "\n");
            }
            Some(s)
        }
        Format::Md => {
            let mut s = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
            for r in &rows {
                s += &format!("| {} |\n", r.join(" | "));
            }
            Some(s)
        }
    };
    let records: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            for (h, v) in header.iter().zip(r) {
                let parsed = v.parse::<f64>().map(Value::from).unwrap_or_else(|_| json!(v));
                m.insert((*h).to_string(), parsed);
            }
            Value::Object(m)
        })
        .collect();
    let mut out = Outcome::value(
        json!({"table": name, "grid": grid}),
        json!({"rows": records}),
        format!("{name} table: {} cells", rows.len()),
    );
    out.text = text;
    Ok(out)
}

pub fn improver(path: &Path) -> Run {
    let j = load_joint(path)?;
    let r = improver_check(&j);
    Ok(Outcome::verdict(
        r.in_s.holds(),
        json!({"joint": joint_to_json(&j)}),
        r.to_json(),
        format!("X + Z >=ssd X: {}; E[Z | X + Z <= x] >= 0: {}", r.in_s, r.in_n),
    ))
}

pub fn marketable(indemnity: &Path, loss: &Path, p0: &str) -> Run {
    let i: IndemnitySchedule<Rational> = load(indemnity, parse_indemnity)?;
    let x = load_law(loss)?;
    let p0 = scalar(p0, "--p0")?;
    let v = marketable_check(&i, &x, &p0)?;
    Ok(Outcome::verdict(
        v.holds(),
        json!({"indemnity": i.to_json(), "loss": law_to_json(&x), "p0": p0.to_json()}),
        v.to_json(),
        format!("widely marketable above {p0}: {v}"),
    ))
}

/// `linear`, `exp:a` or `power:gamma`.
pub fn parse_utility(s: &str) -> Result<Utility, String> {
    let (name, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = || {
        arg.parse::<f64>()
            .map_err(|_| format!("utility parameter \"{arg}\" is not a number"))
    };
    let u = match name {
        "linear" if arg.is_empty() => Utility::Linear,
        "exp" => Utility::Exponential(num()?),
        "power" => Utility::Power(num()?),
        _ => return Err(format!("unknown utility \"{s}\"; use linear, exp:a or power:gamma")),
    };
    u.validate().map_err(|e| e.to_string())
}

fn utility_json(u: Utility) -> Value {
    match u {
        Utility::Linear => json!({"type": "linear"}),
        Utility::Exponential(a) => json!({"type": "exp", "a": a}),
        Utility::Power(g) => json!({"type": "power", "gamma": g}),
    }
}

pub fn premium(utility: Utility, wealth: f64, loss: &Path, indemnity: &Path) -> Run {
    let xl = load_law(loss)?;
    let x = finite(&xl, loss)?;
    let i: IndemnitySchedule<Rational> = load(indemnity, parse_indemnity)?;
    let p = indifference_premium(utility, wealth, &x, &i)?;
    Ok(Outcome::value(
        json!({
            "utility": utility_json(utility),
            "wealth": wealth,
            "loss": discrete_to_json(&x),
            "indemnity": i.to_json(),
        }),
        json!({"premium": p}),
        format!("indifference premium {p}"),
    ))
}

pub fn stoploss_compare(path: &Path, deductibles: &[String]) -> Run {
    let j = load_joint(path)?;
    let ds = deductibles
        .iter()
        .map(|d| scalar(d, "--deductible"))
        .collect::<Result<Vec<_>, _>>()?;
    let r = stop_loss_compare(&j, if ds.is_empty() { None } else { Some(&ds) })?;
    Ok(Outcome::verdict(
        r.dominates(),
        json!({"joint": joint_to_json(&j)}),
        r.to_json(),
        format!(
            "E[Z | X >= x] >= 0: {}; stop-loss dominance at {} deductibles: {}",
            r.condition,
            r.deductibles.len(),
            r.dominates()
        ),
    ))
}

pub fn protective_put(params: BsParams, times: &[f64]) -> Run {
    let mut reports = Vec::with_capacity(times.len());
    let mut holds = true;
    let mut notes = Vec::new();
    for &t in times {
        let r = protective_put_check(&params, t, None)?;
        let ok = r.holds() && r.put_decreasing && r.position_increasing;
        holds &= ok;
        notes.push(format!("t={t}: {}", if ok { "holds" } else { "fails" }));
        reports.push(r.to_json());
    }
    Ok(Outcome::verdict(
        holds,
        json!({
            "spot": params.spot,
            "strike": params.strike,
            "sigma": params.sigma,
            "drift": params.drift,
            "horizon": params.horizon,
            "t": times,
        }),
        json!({"p0": params.put(0.0, params.spot), "snapshots": reports}),
        format!("protective put: {}", notes.join(", ")),
    ))
}

/// Which single-law functional to evaluate.
#[derive(Clone, Copy, Debug)]
pub enum Functional {
    Es,
    Phi,
    StopLoss,
}

impl Functional {
    fn name(self) -> &'static str {
        match self {
            Functional::Es => "es",
            Functional::Phi => "phi",
            Functional::StopLoss => "stoploss",
        }
    }

    fn arg(self) -> &'static str {
        match self {
            Functional::StopLoss => "deductible",
            _ => "level",
        }
    }
}

/// Exact on finite laws, closed form on the parametric families.
pub fn functional(f: Functional, arg: &str, path: &Path) -> Run {
    let law = load_law(path)?;
    let a = scalar(arg, &format!("--{}", f.arg()))?;
    let value = match law.to_discrete() {
        Some(d) => match f {
            Functional::Es => d.es(&a)?,
            Functional::Phi => d.phi(&a)?,
            Functional::StopLoss => d.stop_loss(&a),
        }
        .to_json(),
        None => {
            let Law::Param(p) = &law else {
                unreachable!("discrete laws convert")
            };
            let a = a.to_f64_lossy();
            json!(match f {
                Functional::Es => p.es(a)?,
                Functional::Phi => p.phi(a)?,
                Functional::StopLoss => p.stop_loss(a),
            })
        }
    };
    let shown = value.as_str().map(str::to_string).unwrap_or_else(|| value.to_string());
    Ok(Outcome::value(
        json!({"law": law_to_json(&law), f.arg(): a.to_json()}),
        json!({ f.name(): value }),
        format!("{} = {shown}", f.name()),
    ))
}

pub fn discretize(path: &Path, n: usize, out: Option<&Path>) -> Run {
    let law = load_law(path)?;
    let Law::Param(p) = &law else {
        return Err(Failure::input(format!("{}: law is already finite", path.display())));
    };
    let d = p.discretize(n)?;
    let dj = discrete_to_json(&d);
    write_out(out, &dj)?;
    Ok(Outcome::value(
        json!({"law": law_to_json(&law), "grid": n}),
        json!({"law": dj, "approximation": "equal-probability midpoint quantiles"}),
        format!("{} discretized on {} atoms", p.kind_name(), d.len()),
    ))
}

/// Default seed of `selfcheck`.
pub const DEFAULT_SEED: u64 = 20_240_101;

/// Random joints: the sufficient conditions must imply their orders.
pub fn selfcheck(seed: u64, count: usize) -> Run {
    let mut rng = generator(seed);
    let (mut premises, mut counterexamples) = (0usize, Vec::new());
    for i in 0..count {
        let j = if i % 2 == 0 {
            random_joint(&mut rng)
        } else {
            random_centred_joint(&mut rng, i % 4 == 1)
        };
        let sum = j.sum_law();
        let conclusion: OrderVerdict<Rational> = check_ssd(&j.marginal_w(), &sum);
        if cond_classic(&j).holds() && !cond_new(&j).holds() {
            counterexamples.push(json!({"draw": i, "issue": "classic without new"}));
        }
        if cond_new(&j).holds() {
            premises += 1;
            if !conclusion.holds() {
                counterexamples.push(json!({"draw": i, "issue": "new without ssd", "joint": joint_to_json(&j)}));
            }
        }
    }
    eprintln!("selfcheck seed {seed}");
    Ok(Outcome::verdict(
        counterexamples.is_empty(),
        json!({"seed": seed, "count": count}),
        json!({"premises": premises, "counterexamples": counterexamples}),
        format!(
            "{count} joints, {premises} satisfy the condition, {} counterexamples",
            counterexamples.len()
        ),
    ))
}
