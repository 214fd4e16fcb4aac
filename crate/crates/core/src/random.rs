//! Seeded generators of small exact laws, joints and order pairs.
//!
//! Values live on the half-integer lattice in `[-3, 3]` and weights are
//! integers summing to at most 60, so every probability has denominator
//! `<= 60`. The generator is ChaCha8, so a seed fixes the whole stream.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{DiscreteDist, JointDist};
use crate::scalar::Scalar;
use crate::Rational;

pub type Generator = ChaCha8Rng;

pub fn generator(seed: u64) -> Generator {
    ChaCha8Rng::seed_from_u64(seed)
}

const DENOMINATOR_CAP: usize = 60;

fn half(k: i64) -> Rational {
    Rational::ratio(k, 2)
}

/// `n` distinct lattice points from `[-3, 3]`, ascending.
fn lattice_points(rng: &mut Generator, n: usize) -> Vec<Rational> {
    let mut pool: Vec<i64> = (-6..=6).collect();
    pool.shuffle(rng);
    let mut picked = pool[..n].to_vec();
    picked.sort_unstable();
    picked.into_iter().map(half).collect()
}

/// `n` positive integer weights with a random total in `[n, 60]`.
fn weights(rng: &mut Generator, n: usize) -> Vec<Rational> {
    assert!(n <= DENOMINATOR_CAP);
    let total = rng.random_range(n..=DENOMINATOR_CAP);
    let mut w = vec![1usize; n];
    for _ in n..total {
        w[rng.random_range(0..n)] += 1;
    }
    w.into_iter().map(|k| Rational::ratio(k as i64, total as i64)).collect()
}

/// A law with between `lo` and `hi` atoms.
pub fn random_discrete(rng: &mut Generator, lo: usize, hi: usize) -> DiscreteDist<Rational> {
    let n = rng.random_range(lo..=hi);
    let xs = lattice_points(rng, n);
    let ps = weights(rng, n);
    DiscreteDist::normalize(xs.into_iter().zip(ps)).expect("positive weights")
}

/// A joint law of `(W, Z)` with 2 to 6 atoms per marginal. Every `W` atom
/// gets at least one cell and each further cell is kept with probability
/// one half.
pub fn random_joint(rng: &mut Generator) -> JointDist<Rational> {
    let (nw, nz) = (rng.random_range(2..=6), rng.random_range(2..=6));
    let ws = lattice_points(rng, nw);
    let zs = lattice_points(rng, nz);
    let mut cells = Vec::new();
    for w in &ws {
        let forced = rng.random_range(0..zs.len());
        for (k, z) in zs.iter().enumerate() {
            if k == forced || rng.random_bool(0.5) {
                cells.push((w.clone(), z.clone()));
            }
        }
    }
    let ps = weights(rng, cells.len());
    JointDist::from_triples(cells.into_iter().zip(ps).map(|((w, z), p)| (w, z, p))).expect("positive weights")
}

/// [`random_joint`] with `Z` recentred so that `E[Z]` is zero or, in
/// `shift_down` mode, lowered further by a random lattice step. Recentring
/// makes the sufficient conditions hold often enough to exercise them.
pub fn random_centred_joint(rng: &mut Generator, shift_down: bool) -> JointDist<Rational> {
    let j = random_joint(rng);
    let mut shift = j.mean_z();
    if shift_down {
        shift += half(rng.random_range(0..=2));
    }
    j.transform(|w, _| w.clone(), |_, z| z.clone() - shift.clone())
}

/// `(X, Z)` with `(X, X + Z)` comonotone: the sums are a sorted draw
/// matched to the sorted atoms of `X`.
pub fn random_comonotone(rng: &mut Generator) -> JointDist<Rational> {
    let n = rng.random_range(1..=6);
    let xs = lattice_points(rng, n);
    let mut ys: Vec<Rational> = (0..n).map(|_| half(rng.random_range(-6..=6))).collect();
    ys.sort();
    let ps = weights(rng, n);
    JointDist::from_triples(xs.into_iter().zip(ys).zip(ps).map(|((x, y), p)| (x.clone(), y - x, p)))
        .expect("positive weights")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `Y = X - s` with `s >= 0`.
    Shift,
    /// One atom of `X` split into two around it, keeping its mean.
    Spread,
    /// A spread followed by a downward shift.
    SpreadShift,
    /// Independent draws.
    Unrelated,
}

fn spread(rng: &mut Generator, x: &DiscreteDist<Rational>) -> DiscreteDist<Rational> {
    let k = rng.random_range(0..x.len());
    let (a, b) = (half(rng.random_range(1..=4)), half(rng.random_range(1..=4)));
    let mut atoms = x.atoms().to_vec();
    let (v, p) = atoms.remove(k);
    let total = a.clone() + b.clone();
    atoms.push((v.clone() - a.clone(), p.clone() * b.clone() / total.clone()));
    atoms.push((v + b, p * a / total));
    DiscreteDist::normalize(atoms).expect("masses stay positive")
}

/// A pair `(X, Y)` of the requested kind.
pub fn random_pair(rng: &mut Generator, kind: PairKind) -> (DiscreteDist<Rational>, DiscreteDist<Rational>) {
    let x = random_discrete(rng, 1, 6);
    let shifted = |rng: &mut Generator, d: &DiscreteDist<Rational>| {
        let s = half(rng.random_range(0..=3));
        d.map(|v| v.clone() - s.clone()).expect("shift keeps the law valid")
    };
    let y = match kind {
        PairKind::Shift => shifted(rng, &x),
        PairKind::Spread => spread(rng, &x),
        PairKind::SpreadShift => {
            let s = spread(rng, &x);
            shifted(rng, &s)
        }
        PairKind::Unrelated => random_discrete(rng, 1, 6),
    };
    (x, y)
}

/// Cycles through the pair kinds.
pub fn pair_kind(i: usize) -> PairKind {
    [
        PairKind::Shift,
        PairKind::Spread,
        PairKind::SpreadShift,
        PairKind::Unrelated,
    ][i % 4]
}

/// A uniform law on `n` distinct lattice points.
pub fn random_uniform(rng: &mut Generator, n: usize) -> DiscreteDist<Rational> {
    let mut pool: Vec<i64> = (-24..=24).collect();
    pool.shuffle(rng);
    DiscreteDist::uniform(pool[..n].iter().map(|&k| half(k))).expect("n >= 1")
}

/// Converts to `f64` for quick float cross-checks.
pub fn to_float(d: &DiscreteDist<Rational>) -> DiscreteDist<f64> {
    DiscreteDist::normalize(d.atoms().iter().map(|(x, p)| (x.to_f64_lossy(), p.to_f64_lossy()))).expect("valid law")
}
