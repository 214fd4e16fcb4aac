//! Run reports, failures and exit codes.

use std::fmt;
use std::time::Duration;

use serde_json::{json, Map, Value};

/// Property holds, or a pure computation succeeded.
pub const EXIT_HOLDS: u8 = 0;
/// Property fails; the witness is in the report.
pub const EXIT_FAILS: u8 = 1;
/// Malformed input, schema violation or usage error.
pub const EXIT_INPUT: u8 = 2;
/// The library caught itself contradicting an independent check.
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    pub fn input(what: impl fmt::Display) -> Self {
        Failure::Input(what.to_string())
    }

    /// Prefixes the message with the file it came from.
    pub fn at(self, source: &str) -> Self {
        match self {
            Failure::Input(m) => Failure::Input(format!("{source}: {m}")),
            other => other,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "input",
            Failure::Internal(_) => "internal",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<stochorder::Error> for Failure {
    fn from(e: stochorder::Error) -> Self {
        match e {
            stochorder::Error::Internal(_) => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// What a subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    /// `None` for computations without a yes/no answer.
    pub holds: Option<bool>,
    pub inputs: Value,
    pub result: Value,
    /// One line for stderr.
    pub summary: String,
    /// Replaces the JSON report on stdout (CSV and Markdown tables).
    pub text: Option<String>,
}

impl Outcome {
    pub fn verdict(holds: bool, inputs: Value, result: Value, summary: String) -> Self {
        Self {
            holds: Some(holds),
            inputs,
            result,
            summary,
            text: None,
        }
    }

    pub fn value(inputs: Value, result: Value, summary: String) -> Self {
        Self {
            holds: None,
            inputs,
            result,
            summary,
            text: None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.holds {
            Some(false) => EXIT_FAILS,
            _ => EXIT_HOLDS,
        }
    }

    /// Keys come out sorted: `serde_json::Map` is ordered by key.
    pub fn report(&self, subcommand: &str, took: Duration) -> Value {
        let mut m = Map::new();
        m.insert("subcommand".into(), json!(subcommand));
        m.insert("inputs".into(), self.inputs.clone());
        m.insert("result".into(), self.result.clone());
        m.insert("holds".into(), json!(self.holds));
        m.insert("timing_ms".into(), json!(millis(took)));
        Value::Object(m)
    }
}

pub fn failure_report(subcommand: &str, f: &Failure, took: Duration) -> Value {
    json!({
        "subcommand": subcommand,
        "error": {"kind": f.kind(), "message": f.to_string()},
        "timing_ms": millis(took),
    })
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
