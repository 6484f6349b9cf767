//! Threshold estimators of integrated covariation, integrated variances and
//! co-jumps.
//!
//! Every statistic uses the same inclusion rule: an increment `Δ` is kept when
//! `Δ² <= r_h` and attributed to a jump otherwise.

mod asynchronous;
mod cojump;
mod sync;

use serde::{Deserialize, Serialize};

pub use asynchronous::{hy_threshold_ic, intervals_overlap};
pub use cojump::{
    classify_jump_intervals, cojump_sum, single_cojump, single_cojumps, CojumpEstimates,
    CojumpVariant, IntervalCojump,
};
pub use sync::{
    avar_ic, beta_rho, ic_standard_error, realized_covariation, realized_variance,
    standardized_ic_error, threshold_adjacent_cross, threshold_cross_power, threshold_ic,
    threshold_iv, truncate, truncated_fraction, AvarEstimate, BetaRho,
};

use crate::error::Result;
use crate::panel::SyncPanel;
use crate::threshold::ThresholdSpec;

/// Every statistic computed from one synchronous panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariationEstimates {
    /// Truncated realized covariation, the estimate of `∫ ρ σ¹ σ² dt`.
    pub ic_hat: f64,
    pub iv1_hat: f64,
    pub iv2_hat: f64,
    /// Full realized covariation `Σ Δ¹ Δ²`.
    pub qcov: f64,
    pub rv1: f64,
    pub rv2: f64,
    /// `qcov - ic_hat`.
    pub cojump_sum: f64,
    pub beta12_hat: Option<f64>,
    pub beta21_hat: Option<f64>,
    pub rho_hat: Option<f64>,
    pub avar_hat: f64,
    pub avar_clamped: bool,
    /// `sqrt(h · avar_hat)`, undefined when the variance estimate is 0.
    pub ic_std_error: Option<f64>,
    pub h: f64,
    pub r_h: f64,
    pub n: usize,
    pub horizon: f64,
}

impl CovariationEstimates {
    /// Standardized error against a known (simulated) covariation.
    pub fn standardized_error(&self, ic_true: f64) -> Result<f64> {
        standardized_ic_error(self.ic_hat, ic_true, self.avar_hat, self.h)
    }

    /// Two-sided asymptotic confidence interval for the covariation, for
    /// data where the truth is unknown. `z` is the normal quantile
    /// (1.96 for 95%).
    pub fn confidence_interval(&self, z: f64) -> Option<(f64, f64)> {
        self.ic_std_error
            .map(|se| (self.ic_hat - z * se, self.ic_hat + z * se))
    }
}

/// Computes all statistics with `r_h = c h^β`, `h` the panel mesh, summing
/// over intervals ending at or before `upto` (default: the full horizon).
pub fn estimate(
    panel: &SyncPanel,
    spec: &ThresholdSpec,
    upto: Option<f64>,
) -> Result<CovariationEstimates> {
    let h = panel.mesh();
    let r_h = spec.threshold(h)?;
    match upto {
        Some(t) => estimate_with_threshold(&panel.up_to(t)?, r_h, h),
        None => estimate_with_threshold(panel, r_h, h),
    }
}

/// As [`estimate`] with an explicit threshold value and mesh.
pub fn estimate_with_threshold(
    panel: &SyncPanel,
    r_h: f64,
    h: f64,
) -> Result<CovariationEstimates> {
    let ic_hat = threshold_ic(panel, r_h)?;
    let iv1_hat = threshold_iv(panel.returns1(), r_h)?;
    let iv2_hat = threshold_iv(panel.returns2(), r_h)?;
    let qcov = realized_covariation(panel);
    let br = beta_rho(ic_hat, iv1_hat, iv2_hat);
    let avar = if panel.len() >= 2 {
        avar_ic(panel, r_h, h)?
    } else {
        AvarEstimate {
            value: 0.0,
            clamped: false,
        }
    };
    Ok(CovariationEstimates {
        ic_hat,
        iv1_hat,
        iv2_hat,
        qcov,
        rv1: realized_variance(panel.returns1()),
        rv2: realized_variance(panel.returns2()),
        cojump_sum: qcov - ic_hat,
        beta12_hat: br.beta12,
        beta21_hat: br.beta21,
        rho_hat: br.rho,
        avar_hat: avar.value,
        avar_clamped: avar.clamped,
        ic_std_error: ic_standard_error(avar.value, h).ok(),
        h,
        r_h,
        n: panel.len(),
        horizon: panel.grid().horizon(),
    })
}
