//! Sufficient dependence conditions on a finite joint law of `(W, Z)`.
//!
//! `x -> E[Z | W <= x]` only changes value when `x` crosses an atom of `W`,
//! and `{W <= x}` has positive mass exactly when `x` is at or above the
//! smallest atom. Checking at the atoms of `W` therefore covers every
//! relevant threshold; the upper-tail conditions are handled the same way.
//! All sums are exact for rational inputs and boundary values (`= 0`) pass.

use crate::dist::JointDist;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::verdict::{OrderVerdict, WitnessKind};

/// Sorted distinct atoms of `W`: the thresholds with `P(W <= x) > 0` at
/// which the conditional means can change.
pub fn relevant_thresholds<T: Scalar>(j: &JointDist<T>) -> Vec<T> {
    j.w_values()
}

/// `(w, P(W = w), E[Z; W = w])` for each atom of `W`.
fn w_groups<T: Scalar>(j: &JointDist<T>) -> Vec<(T, T, T)> {
    let mut out: Vec<(T, T, T)> = Vec::new();
    for a in j.atoms() {
        let zp = a.z.clone() * a.p.clone();
        match out.last_mut() {
            Some(last) if last.0 == a.w => {
                last.1 = last.1.clone() + a.p.clone();
                last.2 = last.2.clone() + zp;
            }
            _ => out.push((a.w.clone(), a.p.clone(), zp)),
        }
    }
    out
}

/// `E[Z | W <= x] <= 0` for every relevant `x`.
pub fn cond_new<T: Scalar>(j: &JointDist<T>) -> OrderVerdict<T> {
    let (mut mass, mut first) = (T::zero(), T::zero());
    for (w, p, zp) in w_groups(j) {
        mass = mass + p;
        first = first + zp;
        if first.is_positive() {
            return OrderVerdict::fail(WitnessKind::Threshold, w, first / mass, T::zero());
        }
    }
    OrderVerdict::pass()
}

/// `E[Z | W] <= 0`: the supermartingale condition, atom by atom.
pub fn cond_classic<T: Scalar>(j: &JointDist<T>) -> OrderVerdict<T> {
    for (w, p, zp) in w_groups(j) {
        if zp.is_positive() {
            return OrderVerdict::fail(WitnessKind::Threshold, w, zp / p, T::zero());
        }
    }
    OrderVerdict::pass()
}

/// `E[Z | W >= x] >= 0` for every relevant `x`; first violation in
/// ascending `x`.
pub fn cond_icx<T: Scalar>(j: &JointDist<T>) -> OrderVerdict<T> {
    let groups = w_groups(j);
    let mut tails: Vec<(T, T)> = Vec::with_capacity(groups.len());
    let (mut mass, mut first) = (T::zero(), T::zero());
    for (_, p, zp) in groups.iter().rev() {
        mass = mass + p.clone();
        first = first + zp.clone();
        tails.push((mass.clone(), first.clone()));
    }
    tails.reverse();
    for ((w, _, _), (mass, first)) in groups.into_iter().zip(tails) {
        if first.is_negative() {
            return OrderVerdict::fail(WitnessKind::Threshold, w, first / mass, T::zero());
        }
    }
    OrderVerdict::pass()
}

/// `E[Z] = 0` together with `E[Z | W <= x] <= 0` for all relevant `x`.
/// The equivalent upper-tail form `E[Z | W >= x] >= 0` is evaluated too and
/// must agree. A nonzero mean is reported at the largest atom of `W`, where
/// the conditional mean is `E[Z]`.
pub fn cond_cx_pair<T: Scalar>(j: &JointDist<T>) -> OrderVerdict<T> {
    let mean = j.mean_z();
    if !mean.is_zero() {
        let top = j.w_values().pop().expect("nonempty joint");
        return OrderVerdict::fail(WitnessKind::Threshold, top, mean, T::zero());
    }
    let lower = cond_new(j);
    assert_eq!(
        lower.holds(),
        cond_icx(j).holds(),
        "lower- and upper-tail forms disagree on a centred joint"
    );
    lower
}

/// Reads the atoms as `(y, z, p)` and checks `E[Z | Y - Z <= x] <= 0` at the
/// atoms of `Y - Z`. Together with `E[Z] = 0` this certifies `Y - Z <=cx Y`.
pub fn cond_theorem2<T: Scalar>(j: &JointDist<T>) -> OrderVerdict<T> {
    cond_new(&j.transform(|y, z| y.clone() - z.clone(), |_, z| z.clone()))
}

/// Whether no two atoms `(a, b)`, `(a', b')` satisfy `(a - a')(b - b') < 0`.
pub fn is_comonotone<T: Scalar>(pairs: &[(T, T, T)]) -> bool {
    first_discordant(pairs).is_none()
}

/// A discordant pair of positive-mass atoms, if any.
pub fn first_discordant<T: Scalar>(pairs: &[(T, T, T)]) -> Option<(usize, usize)> {
    let live: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].2.is_positive()).collect();
    let mut order = live.clone();
    order.sort_by(|&i, &k| {
        crate::dist::discrete::cmp_scalar(&pairs[i].0, &pairs[k].0)
            .then_with(|| crate::dist::discrete::cmp_scalar(&pairs[i].1, &pairs[k].1))
    });
    // Sorted by (a, b), the pairs are comonotone iff b never decreases
    // across a strict increase in a.
    let mut best: Option<usize> = None;
    let mut group_start = 0;
    while group_start < order.len() {
        let mut group_end = group_start;
        while group_end < order.len() && pairs[order[group_end]].0 == pairs[order[group_start]].0 {
            group_end += 1;
        }
        let lowest = order[group_start];
        if let Some(prev) = best {
            if pairs[lowest].1 < pairs[prev].1 {
                return Some((prev, lowest));
            }
        }
        best = Some(order[group_end - 1]);
        group_start = group_end;
    }
    None
}

/// `is_comonotone` as a `Result`, naming the discordant atoms.
pub fn require_comonotone<T: Scalar>(pairs: &[(T, T, T)]) -> Result<()> {
    match first_discordant(pairs) {
        None => Ok(()),
        Some((i, k)) => Err(Error::NotComonotone(
            format!("{}, {}", pairs[i].0, pairs[i].1),
            format!("{}, {}", pairs[k].0, pairs[k].1),
        )),
    }
}
