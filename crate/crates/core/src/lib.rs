//! Threshold (truncation) estimation of the integrated covariation of two
//! jump-diffusions observed at discrete times.
//!
//! The crate is organised in four layers:
//!
//! - [`grid`], [`panel`], [`threshold`]: observation grids, sampled paths,
//!   synchronous/asynchronous panels and the `r_h = c h^β` threshold rule.
//! - [`estimators`]: truncated realized covariation and variances, the
//!   cross-power statistics behind the standard error, β/ρ estimators,
//!   co-jump estimators and the asynchronous overlap estimator.
//! - [`simulate`]: a stochastic-volatility + compound-Poisson model and a
//!   constant-volatility + Variance Gamma model on a 1-second Euler grid,
//!   with ground truths recorded along the way.
//! - [`experiments`]: the Monte Carlo harness (bias summaries, threshold
//!   sweeps, co-jump variant comparison).

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod grid;
pub mod panel;
pub mod simulate;
pub mod sum;
pub mod threshold;

pub use error::{Error, Result};
pub use grid::{SampledPath, TimeGrid};
pub use panel::{AsyncPanel, SyncPanel};
pub use threshold::ThresholdSpec;
