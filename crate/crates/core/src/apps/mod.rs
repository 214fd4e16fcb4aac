//! Applications: region tables for the Gaussian and Bernoulli examples,
//! stochastic improvers, insurance indemnities and the protective put.

pub mod improver;
pub mod insurance;
pub mod options;
pub mod regions;

pub use improver::{gaussian_improver_joint, improver_check, prop4_check, ImproverReport};
pub use insurance::{
    exp_fixed_conditional, exp_stop_loss_conditional, indifference_premium, marketable_check, stop_loss_compare,
    IndemnitySchedule, StopLossReport, Utility,
};
pub use options::{black_scholes_call, black_scholes_put, bs_put, protective_put_check, BsParams, ProtectivePutReport};
pub use regions::{
    bernoulli_grid, bernoulli_region, gaussian_grid, gaussian_region, BernoulliCase, GaussianCase, Region, Region3,
};
