//! Simulation of the two benchmark models on a fine Euler grid.
//!
//! - Model 1: log-OU stochastic volatility for each diffusion, correlated
//!   Brownian drivers, compound Poisson jumps with Gaussian sizes.
//! - Model 2: constant volatilities, correlated Brownian drivers, Variance
//!   Gamma jumps.
//!
//! In both models the second jump component is `J² = ρ_J J¹ + sqrt(1-ρ_J²) J³`
//! with `J³` an independent copy-type process, so `J¹` and `J²` share jump
//! times whenever `ρ_J ≠ 0`.

mod bundle;
mod config;
mod generators;

pub use bundle::{build_paths, Component, GridJump, JumpRecord, PathBundle, RngSeed, Truths};
pub use config::{
    JumpSizeLaw, Model1Config, Model2Config, ModelConfig, Sampling, SvParams, VgParams,
};
pub use generators::{
    correlate_jumps, correlated_brownian_increments, simulate_compound_poisson, simulate_sv_path,
    simulate_vg_increments, JumpEvent,
};
