use std::fmt;

use serde_json::{json, Value};

use crate::scalar::Scalar;

/// What the witness value of a failed check indexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// A probability level `p`.
    Level,
    /// A threshold `x` on the value axis.
    Threshold,
    /// The argument `t` of `E[min(X, t)]` or `E[(X - t)+]`.
    Angle,
}

impl WitnessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessKind::Level => "level_p",
            WitnessKind::Threshold => "threshold_x",
            WitnessKind::Angle => "angle_t",
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Location of a violation together with both sides of the compared
/// inequality evaluated there.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<T> {
    pub kind: WitnessKind,
    pub value: T,
    pub lhs: T,
    pub rhs: T,
}

/// Outcome of every checker. A witness is present exactly when the
/// relation fails.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderVerdict<T> {
    witness: Option<Witness<T>>,
}

impl<T: Scalar> OrderVerdict<T> {
    pub fn pass() -> Self {
        Self { witness: None }
    }

    pub fn fail(kind: WitnessKind, value: T, lhs: T, rhs: T) -> Self {
        Self {
            witness: Some(Witness { kind, value, lhs, rhs }),
        }
    }

    pub fn from_witness(witness: Option<Witness<T>>) -> Self {
        Self { witness }
    }

    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&Witness<T>> {
        self.witness.as_ref()
    }

    pub fn into_witness(self) -> Option<Witness<T>> {
        self.witness
    }

    pub fn map<U: Scalar, F: Fn(&T) -> U>(&self, f: F) -> OrderVerdict<U> {
        OrderVerdict {
            witness: self.witness.as_ref().map(|w| Witness {
                kind: w.kind,
                value: f(&w.value),
                lhs: f(&w.lhs),
                rhs: f(&w.rhs),
            }),
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.witness {
            None => json!({ "holds": true }),
            Some(w) => json!({
                "holds": false,
                "witness": {
                    "kind": w.kind.as_str(),
                    "value": w.value.to_json(),
                    "lhs": w.lhs.to_json(),
                    "rhs": w.rhs.to_json(),
                }
            }),
        }
    }
}

impl<T: Scalar> fmt::Display for OrderVerdict<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "holds"),
            Some(w) => write!(f, "fails at {}={} (lhs {}, rhs {})", w.kind, w.value, w.lhs, w.rhs),
        }
    }
}
