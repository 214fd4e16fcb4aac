use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use stochorder::json::{parse_joint, parse_law};
use stochorder::{cond_classic, Rational};
use tempfile::TempDir;

const U0123: &str = r#"{"type":"discrete","atoms":[{"x":0,"p":1},{"x":1,"p":1},{"x":2,"p":1},{"x":3,"p":1}]}"#;
// U0123 with its outer atoms pushed one step further out.
const SPREAD: &str =
    r#"{"type":"discrete","atoms":[{"x":-1,"p":"1/4"},{"x":1,"p":"1/4"},{"x":2,"p":"1/4"},{"x":4,"p":"1/4"}]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stochorder"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn es_of_uniform_law_is_exact() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    let out = run(&["es", "--level", "0.5", s(&u)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["es"], "5/2");
    assert_eq!(r["subcommand"], "es");
    assert!(r["timing_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn phi_and_stoploss() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    // (1 - 1/2) * 5/2 and E[(X - 1)+] = (1 + 2) / 4.
    assert_eq!(report(&run(&["phi", "--level", "1/2", s(&u)]))["result"]["phi"], "5/4");
    assert_eq!(
        report(&run(&["stoploss", "--deductible", "1", s(&u)]))["result"]["stoploss"],
        "3/4"
    );
    let e = fixture(&dir, "e.json", r#"{"type":"exponential","rate":1}"#);
    let v = report(&run(&["stoploss", "--deductible", "2", s(&e)]))["result"]["stoploss"]
        .as_f64()
        .unwrap();
    assert!((v - (-2.0f64).exp()).abs() < 1e-12);
}

#[test]
fn bernoulli_table_row() {
    let out = run(&["table", "bernoulli", "--grid", "default"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,rho,ssd,new,classic"));
    let row = lines.find(|l| l.starts_with("0.6,0.5,")).expect("row present");
    assert_eq!(row, "0.6,0.5,1,1,0");
    assert_eq!(text.lines().count(), 1 + 16 * 21);
}

#[test]
fn table_formats() {
    let j = report(&run(&["table", "gaussian", "--format", "json"]));
    assert_eq!(j["result"]["rows"].as_array().unwrap().len(), 4 * 3 * 19);
    let md = String::from_utf8(run(&["table", "bernoulli", "--format", "md"]).stdout).unwrap();
    assert!(md.starts_with("| c | rho | ssd | new | classic |\n|---|"));
    assert_eq!(run(&["table", "bernoulli", "--grid", "fine"]).status.code(), Some(2));
}

#[test]
fn equal_laws_hold_in_every_order() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    for rel in ["ssd", "icx", "cx", "st"] {
        let out = run(&["check-order", "--relation", rel, s(&u), s(&u)]);
        assert_eq!(out.status.code(), Some(0), "{rel}");
        assert_eq!(report(&out)["holds"], true);
    }
}

#[test]
fn failing_order_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    let y = fixture(&dir, "y.json", SPREAD);
    // Same mean 3/2; the spread is riskier, so U >=ssd Y but not the reverse.
    assert_eq!(
        run(&["check-order", "--relation", "ssd", s(&u), s(&y)]).status.code(),
        Some(0)
    );
    let out = run(&["check-order", "--relation", "ssd", s(&y), s(&u)]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["holds"], false);
    assert!(r["result"]["witness"]["kind"].is_string());
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = fixture(&dir, "bad.json", "{not json");
    let out = run(&["es", "--level", "0.5", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "input");

    let schema = fixture(
        &dir,
        "schema.json",
        r#"{"type":"discrete","atoms":[{"x":0,"p":1},{"x":1,"p":"1/0"}]}"#,
    );
    let out = run(&["es", "--level", "0.5", s(&schema)]);
    assert_eq!(out.status.code(), Some(2));
    let msg = report(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("schema.json") && msg.contains("$.atoms[1].p"), "{msg}");

    let u = fixture(&dir, "u.json", U0123);
    assert_eq!(run(&["es", "--level", "1", s(&u)]).status.code(), Some(2));
    assert_eq!(run(&["es", "--level", "0.5", "missing.json"]).status.code(), Some(2));
    assert_eq!(
        run(&["check-order", "--relation", "nope", s(&u), s(&u)]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["protective-put", "--drift", "0.05"]).status.code(), Some(2));
}

#[test]
fn mixed_kinds_are_rejected_until_discretized() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    let n = fixture(&dir, "n.json", r#"{"type":"normal","mu":1.5,"sigma":1}"#);
    assert_eq!(
        run(&["check-order", "--relation", "ssd", s(&u), s(&n)]).status.code(),
        Some(2)
    );
    let d = dir.path().join("d.json");
    let out = run(&["discretize", "--grid", "16", s(&n), "--output", s(&d)]);
    assert_eq!(out.status.code(), Some(0));
    let law: stochorder::Law<Rational> =
        parse_law(&serde_json::from_str(&fs::read_to_string(&d).unwrap()).unwrap()).unwrap();
    assert_eq!(law.to_discrete().unwrap().len(), 16);
    assert!(
        run(&["check-order", "--relation", "ssd", s(&u), s(&d)])
            .status
            .code()
            .unwrap()
            <= 1
    );
    let p = fixture(&dir, "p.json", r#"{"type":"point","c":2}"#);
    assert_eq!(run(&["discretize", "--grid", "1", s(&n)]).status.code(), Some(2));
    assert_eq!(run(&["discretize", "--grid", "5", s(&u)]).status.code(), Some(2));
    let single = report(&run(&["discretize", "--grid", "5", s(&p)]));
    assert_eq!(single["result"]["law"]["atoms"].as_array().unwrap().len(), 1);
}

#[test]
fn echoed_inputs_round_trip() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    let y = fixture(&dir, "y.json", SPREAD);
    let r = report(&run(&["check-order", "--relation", "cx", s(&u), s(&y)]));
    for (key, path) in [("x", &u), ("y", &y)] {
        let original: stochorder::Law<Rational> =
            parse_law(&serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()).unwrap();
        let echoed: stochorder::Law<Rational> = parse_law(&r["inputs"][key]).unwrap();
        assert_eq!(original, echoed);
    }
}

#[test]
fn report_keys_are_sorted() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    let out = run(&["es", "--level", "0.25", s(&u)]);
    let text = String::from_utf8(out.stdout).unwrap();
    let top: Vec<usize> = [
        "\"holds\"",
        "\"inputs\"",
        "\"result\"",
        "\"subcommand\"",
        "\"timing_ms\"",
    ]
    .iter()
    .map(|k| text.find(&format!("\n  {k}")).unwrap_or_else(|| panic!("{k} missing")))
    .collect();
    assert!(top.windows(2).all(|w| w[0] < w[1]), "{text}");
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
}

#[test]
fn synthesized_coupling_satisfies_the_classic_condition() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    let y = fixture(&dir, "y.json", SPREAD);
    let c = dir.path().join("c.json");
    for mode in ["ssd", "cx"] {
        let out = run(&["synthesize", "--mode", mode, s(&u), s(&y), "--output", s(&c)]);
        assert_eq!(out.status.code(), Some(0), "{mode}");
        let j = parse_joint::<Rational>(&serde_json::from_str(&fs::read_to_string(&c).unwrap()).unwrap()).unwrap();
        assert!(cond_classic(&j).holds());
        assert_eq!(run(&["check-cond", "--which", "classic", s(&c)]).status.code(), Some(0));
        assert_eq!(run(&["check-cond", "--which", "new", s(&c)]).status.code(), Some(0));
    }
    let out = run(&["synthesize", "--mode", "cx", s(&y), s(&u)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["feasible"], false);
}

#[test]
fn support_guard_can_be_overridden() {
    let dir = TempDir::new().unwrap();
    let u = fixture(&dir, "u.json", U0123);
    let y = fixture(&dir, "y.json", SPREAD);
    let tight = bin()
        .args(["synthesize", "--mode", "ssd", s(&u), s(&y)])
        .env("STOCHORDER_MAX_SUPPORT", "3")
        .output()
        .unwrap();
    assert_eq!(tight.status.code(), Some(2));
    let garbled = bin()
        .args(["synthesize", "--mode", "ssd", s(&u), s(&y)])
        .env("STOCHORDER_MAX_SUPPORT", "many")
        .output()
        .unwrap();
    assert_eq!(garbled.status.code(), Some(2));
}

#[test]
fn insurance_subcommands() {
    let dir = TempDir::new().unwrap();
    let x = fixture(
        &dir,
        "x.json",
        r#"{"type":"discrete","atoms":[{"x":0,"p":1},{"x":1,"p":1},{"x":3,"p":1}]}"#,
    );
    let sl = fixture(&dir, "sl.json", r#"{"type":"stop_loss","deductible":"1/2"}"#);
    // E[(X - 1/2)+] = (1/2 + 5/2) / 3 = 1.
    let r = report(&run(&[
        "premium",
        "--utility",
        "linear",
        "--wealth",
        "10",
        "--loss",
        s(&x),
        "--indemnity",
        s(&sl),
    ]));
    assert!((r["result"]["premium"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let out = run(&[
        "premium",
        "--utility",
        "exp:1",
        "--wealth",
        "10",
        "--loss",
        s(&x),
        "--indemnity",
        s(&sl),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["result"]["premium"].as_f64().unwrap() > 1.0);
    assert_eq!(
        run(&[
            "premium",
            "--utility",
            "power:2",
            "--wealth",
            "10",
            "--loss",
            s(&x),
            "--indemnity",
            s(&sl)
        ])
        .status
        .code(),
        Some(2)
    );

    let e = fixture(&dir, "e.json", r#"{"type":"exponential","rate":1}"#);
    let fixed = fixture(&dir, "f.json", r#"{"type":"fixed","threshold":1,"amount":1}"#);
    let floor = format!("{}", (-1.0f64).exp());
    let above = format!("{}", (-1.0f64).exp() + 1e-6);
    let m = |p: &str| {
        run(&["marketable", "--indemnity", s(&fixed), "--loss", s(&e), "--p0", p])
            .status
            .code()
    };
    assert_eq!(m(&floor), Some(0));
    assert_eq!(m(&above), Some(1));
    assert_eq!(m("0"), Some(0));
}

#[test]
fn improver_and_stop_loss_compare() {
    let dir = TempDir::new().unwrap();
    // Z = 0: trivially an improver, and stop-loss premiums tie.
    let zero = fixture(
        &dir,
        "z.json",
        r#"{"type":"joint","atoms":[{"w":0,"z":0,"p":1},{"w":2,"z":0,"p":1}]}"#,
    );
    let r = report(&run(&["improver", s(&zero)]));
    assert_eq!(r["result"]["in_S"]["holds"], true);
    assert_eq!(r["result"]["in_N"]["holds"], true);
    assert_eq!(run(&["stoploss-compare", s(&zero)]).status.code(), Some(0));
    // Z = -1 everywhere lowers every stop-loss premium.
    let down = fixture(
        &dir,
        "d.json",
        r#"{"type":"joint","atoms":[{"w":1,"z":-1,"p":1},{"w":3,"z":-1,"p":1}]}"#,
    );
    let out = run(&["stoploss-compare", s(&down), "--deductible", "0", "--deductible", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["result"]["deductibles"].as_array().unwrap().len(), 2);
    assert_eq!(run(&["improver", s(&down)]).status.code(), Some(1));
}

#[test]
fn protective_put_and_selfcheck() {
    let out = run(&["protective-put", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["result"]["p0"].as_f64().unwrap() - 0.079656).abs() < 1e-6);
    let out = run(&["selfcheck", "--seed", "11", "--count", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["inputs"]["seed"], 11);
    assert!(String::from_utf8(out.stderr).unwrap().contains("seed 11"));
}
