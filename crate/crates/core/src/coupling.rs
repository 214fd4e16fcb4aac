//! Strassen-type couplings of two finite marginals.
//!
//! Given laws `X` (of `W`) and `Y` (of `W + Z`), find a transport matrix
//! `pi` with row sums `P(X = w_i)`, column sums `P(Y = y_j)` and, on every
//! row, `sum_j pi_ij (y_j - w_i) <= 0` (supermartingale mode, `E[Z|W] <= 0`)
//! or `= 0` (martingale mode, `E[Z|W] = 0`). Such a matrix exists exactly
//! when `X >=ssd Y`, respectively `X <=cx Y`.

use std::fmt;

use crate::dist::{DiscreteDist, JointDist};
use crate::error::{Error, Result};
use crate::lp::FeasibilityProblem;
use crate::order::{check_cx, check_ssd};
use crate::scalar::{sum, Scalar};
use crate::verdict::OrderVerdict;

/// Largest support, per marginal, accepted by default.
pub const DEFAULT_MAX_SUPPORT: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `E[Z | W] <= 0`
    Supermartingale,
    /// `E[Z | W] = 0`
    Martingale,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Supermartingale => "supermartingale",
            Mode::Martingale => "martingale",
        })
    }
}

/// Transport plan between two finite marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling<T> {
    pub rows: Vec<(T, T)>,
    pub cols: Vec<(T, T)>,
    /// `pi[i][j]`, indexed by row atom then column atom.
    pub pi: Vec<Vec<T>>,
}

impl<T: Scalar> Coupling<T> {
    /// Joint law of `(W, Z)` with `Z = y_j - w_i` on cell `(i, j)`.
    pub fn to_joint(&self) -> JointDist<T> {
        let mut atoms = Vec::new();
        for (i, (w, _)) in self.rows.iter().enumerate() {
            for (j, (y, _)) in self.cols.iter().enumerate() {
                let p = &self.pi[i][j];
                if p.is_positive() {
                    atoms.push((w.clone(), y.clone() - w.clone(), p.clone()));
                }
            }
        }
        JointDist::from_triples(atoms).expect("a coupling carries unit mass")
    }

    /// Coupling from a joint law of `(W, Z)`, columns indexed by `W + Z`.
    pub fn from_joint(j: &JointDist<T>) -> Self {
        let x = j.marginal_w();
        let y = j.sum_law();
        let mut pi = vec![vec![T::zero(); y.len()]; x.len()];
        for a in j.atoms() {
            let i = x.values().position(|v| *v == a.w).expect("atom of the marginal");
            let s = a.w.clone() + a.z.clone();
            let k = y.values().position(|v| *v == s).expect("atom of the sum law");
            pi[i][k] = pi[i][k].clone() + a.p.clone();
        }
        Self {
            rows: x.atoms().to_vec(),
            cols: y.atoms().to_vec(),
            pi,
        }
    }
}

/// Either a coupling or the violated order that rules one out.
#[derive(Clone, Debug, PartialEq)]
pub enum SynthResult<T> {
    Feasible(Coupling<T>),
    Infeasible(OrderVerdict<T>),
}

impl<T> SynthResult<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SynthResult::Feasible(_))
    }

    pub fn coupling(&self) -> Option<&Coupling<T>> {
        match self {
            SynthResult::Feasible(c) => Some(c),
            SynthResult::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&OrderVerdict<T>> {
        match self {
            SynthResult::Infeasible(v) => Some(v),
            SynthResult::Feasible(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SynthOptions {
    pub max_support: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            max_support: DEFAULT_MAX_SUPPORT,
        }
    }
}

pub fn synth_supermartingale<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> Result<SynthResult<T>> {
    synthesize(x, y, Mode::Supermartingale, SynthOptions::default())
}

pub fn synth_martingale<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>) -> Result<SynthResult<T>> {
    synthesize(x, y, Mode::Martingale, SynthOptions::default())
}

pub fn synthesize<T: Scalar>(
    x: &DiscreteDist<T>,
    y: &DiscreteDist<T>,
    mode: Mode,
    options: SynthOptions,
) -> Result<SynthResult<T>> {
    for d in [x, y] {
        if d.len() > options.max_support {
            return Err(Error::SupportTooLarge {
                size: d.len(),
                limit: options.max_support,
            });
        }
    }
    let pi = if x.len() == 1 || y.len() == 1 {
        degenerate_plan(x, y, mode)
    } else {
        lp_plan(x, y, mode)
    };
    match pi {
        Some(pi) => Ok(SynthResult::Feasible(Coupling {
            rows: x.atoms().to_vec(),
            cols: y.atoms().to_vec(),
            pi,
        })),
        None => {
            let verdict = match mode {
                Mode::Supermartingale => check_ssd(x, y),
                Mode::Martingale => check_cx(x, y),
            };
            if verdict.holds() {
                return Err(Error::Internal(format!(
                    "no {mode} coupling found although the order holds"
                )));
            }
            Ok(SynthResult::Infeasible(verdict))
        }
    }
}

fn row_satisfied<T: Scalar>(drift: &T, mode: Mode) -> bool {
    match mode {
        Mode::Supermartingale => !drift.is_positive(),
        Mode::Martingale => drift.is_zero(),
    }
}

/// With a single atom on either side the plan is forced.
fn degenerate_plan<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>, mode: Mode) -> Option<Vec<Vec<T>>> {
    let pi: Vec<Vec<T>> = x
        .probs()
        .map(|p| y.probs().map(|q| p.clone() * q.clone()).collect())
        .collect();
    let feasible = x.atoms().iter().zip(&pi).all(|((w, _), row)| {
        let drift = y
            .values()
            .zip(row)
            .fold(T::zero(), |acc, (v, p)| acc + (v.clone() - w.clone()) * p.clone());
        row_satisfied(&drift, mode)
    });
    feasible.then_some(pi)
}

fn lp_plan<T: Scalar>(x: &DiscreteDist<T>, y: &DiscreteDist<T>, mode: Mode) -> Option<Vec<Vec<T>>> {
    let (n, m) = (x.len(), y.len());
    let cell = |i: usize, j: usize| i * m + j;
    let slacks = match mode {
        Mode::Supermartingale => n,
        Mode::Martingale => 0,
    };
    let mut lp = FeasibilityProblem::new(n * m + slacks);
    for (i, (_, p)) in x.atoms().iter().enumerate() {
        let entries: Vec<_> = (0..m).map(|j| (cell(i, j), T::one())).collect();
        lp.add_sparse_row(&entries, p.clone());
    }
    for (j, (_, q)) in y.atoms().iter().enumerate() {
        let entries: Vec<_> = (0..n).map(|i| (cell(i, j), T::one())).collect();
        lp.add_sparse_row(&entries, q.clone());
    }
    for (i, (w, _)) in x.atoms().iter().enumerate() {
        let mut entries: Vec<_> = y
            .values()
            .enumerate()
            .map(|(j, v)| (cell(i, j), v.clone() - w.clone()))
            .collect();
        if mode == Mode::Supermartingale {
            entries.push((n * m + i, T::one()));
        }
        lp.add_sparse_row(&entries, T::zero());
    }
    let solution = lp.solve()?;
    Some((0..n).map(|i| solution[i * m..(i + 1) * m].to_vec()).collect())
}

/// Re-validates a plan against the marginals with plain exact sums,
/// independently of the simplex.
pub fn verify_coupling<T: Scalar>(c: &Coupling<T>, x: &DiscreteDist<T>, y: &DiscreteDist<T>, mode: Mode) -> bool {
    if c.rows.as_slice() != x.atoms() || c.cols.as_slice() != y.atoms() {
        return false;
    }
    if c.pi.len() != c.rows.len() || c.pi.iter().any(|r| r.len() != c.cols.len()) {
        return false;
    }
    if c.pi.iter().flatten().any(|p| p.is_negative()) {
        return false;
    }
    for ((w, p), row) in c.rows.iter().zip(&c.pi) {
        if sum(row.iter()) != *p {
            return false;
        }
        let drift = c.cols.iter().zip(row).fold(T::zero(), |acc, ((v, _), mass)| {
            acc + (v.clone() - w.clone()) * mass.clone()
        });
        if !row_satisfied(&drift, mode) {
            return false;
        }
    }
    (0..c.cols.len()).all(|j| sum(c.pi.iter().map(|r| &r[j])) == c.cols[j].1)
}
