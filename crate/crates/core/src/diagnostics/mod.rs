//! Field-level diagnostics: vorticity-direction angles and Hölder fits, the
//! stretching kernel, Riesz bounds, weighted enstrophy and its balance.

mod balance;
mod holder;
mod kernel;
mod record;

pub use balance::{
    balance_residual, generalized_enstrophy, grad_term, smoothed_magnitude, BalanceReport,
};
pub use holder::{
    estimate_holder, linear_fit, quantile, sample_pairs, sin_theta, AnglePairSample, HolderFit,
    HolderOptions, LogBins, BETA_CAP,
};
pub use kernel::{kernel_K, riesz_bound_constant, riesz_bound_constant_with, riesz_mapping_ratio};
pub use record::{Diagnostics, DiagnosticsConfig, DiagnosticsRecord, WeightedTerms};
