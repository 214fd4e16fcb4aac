//! Stochastic orders on finite and parametric laws: second-order dominance,
//! increasing convex and convex order, the dependence conditions that
//! imply them, Strassen couplings, and a few insurance and option
//! applications.
//!
//! Finite laws are generic over [`Scalar`]; [`Rational`] gives exact
//! verdicts and is what the crate-root aliases use.
//!
//! ```
//! use stochorder::{check_ssd, cond_new, DiscreteDist, JointDist, Rational, Scalar};
//!
//! let q = |n, d| Rational::ratio(n, d);
//! let w = DiscreteDist::uniform([q(0, 1), q(1, 1)]).unwrap();
//! let j = JointDist::from_triples([
//!     (q(0, 1), q(-1, 2), q(1, 4)),
//!     (q(0, 1), q(0, 1), q(1, 4)),
//!     (q(1, 1), q(0, 1), q(1, 2)),
//! ])
//! .unwrap();
//! assert!(cond_new(&j).holds());
//! assert!(check_ssd(&w, &j.sum_law()).holds());
//! ```

pub mod apps;
pub mod coupling;
pub mod dependence;
pub mod dist;
pub mod error;
pub mod json;
pub mod lp;
pub mod order;
pub mod random;
pub mod risk;
pub mod scalar;
pub mod special;
pub mod verdict;

pub use coupling::{
    synth_martingale, synth_supermartingale, synthesize, verify_coupling, Coupling, Mode, SynthOptions, SynthResult,
};
pub use dependence::{cond_classic, cond_cx_pair, cond_icx, cond_new, cond_theorem2, is_comonotone};
pub use dist::{DiscreteDist, JointAtom, JointDist, Law, ParamDist};
pub use error::{Error, Result};
pub use order::{check, check_cx, check_icx, check_ssd, check_st, Relation};
pub use risk::PhiEnvelope;
pub use scalar::Scalar;
pub use verdict::{OrderVerdict, Witness, WitnessKind};

/// Exact scalar used throughout.
pub type Rational = num_rational::BigRational;
pub type ExactDist = DiscreteDist<Rational>;
pub type FloatDist = DiscreteDist<f64>;
pub type ExactJoint = JointDist<Rational>;
pub type FloatJoint = JointDist<f64>;
pub type ExactVerdict = OrderVerdict<Rational>;
pub type ExactCoupling = Coupling<Rational>;
pub type ExactLaw = Law<Rational>;
