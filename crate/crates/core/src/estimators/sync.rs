//! Threshold statistics on a synchronous panel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::SyncPanel;
use crate::sum::{compensated_sum, CompensatedSum};
use crate::threshold::check_r_h;

/// `x` if `x² <= r_h`, else 0. Ties are kept.
#[inline]
pub fn truncate(x: f64, r_h: f64) -> f64 {
    if x * x <= r_h {
        x
    } else {
        0.0
    }
}

#[inline]
fn indicator(x: f64, r_h: f64) -> f64 {
    if x * x <= r_h {
        1.0
    } else {
        0.0
    }
}

fn check_mesh(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "mesh h must be positive, got {h}"
        )))
    }
}

/// `Σ_j Δ_j X¹ Δ_j X²`.
pub fn realized_covariation(panel: &SyncPanel) -> f64 {
    compensated_sum(panel.pairs().map(|(a, b)| a * b))
}

/// Plain realized variance `Σ_j (Δ_j X)²`.
pub fn realized_variance(returns: &[f64]) -> f64 {
    compensated_sum(returns.iter().map(|x| x * x))
}

/// Truncated realized covariation: the cross products of increments whose
/// squares both stay within `r_h`.
pub fn threshold_ic(panel: &SyncPanel, r_h: f64) -> Result<f64> {
    check_r_h(r_h)?;
    Ok(compensated_sum(
        panel
            .pairs()
            .map(|(a, b)| truncate(a, r_h) * truncate(b, r_h)),
    ))
}

/// Truncated realized variance of one return series.
pub fn threshold_iv(returns: &[f64], r_h: f64) -> Result<f64> {
    check_r_h(r_h)?;
    Ok(compensated_sum(returns.iter().map(|&x| {
        let t = truncate(x, r_h);
        t * t
    })))
}

/// `h^{1-(r+l)/2} Σ_j (Δ_j X¹)^r 1{(Δ_j X¹)² <= r_h} (Δ_j X²)^l 1{(Δ_j X²)² <= r_h}`.
pub fn threshold_cross_power(panel: &SyncPanel, r: u32, l: u32, r_h: f64, h: f64) -> Result<f64> {
    if r == 0 && l == 0 {
        return Err(Error::InvalidArgument(
            "powers r = l = 0 are not allowed".into(),
        ));
    }
    check_r_h(r_h)?;
    check_mesh(h)?;
    let (r_i, l_i) = (r as i32, l as i32);
    let sum = compensated_sum(
        panel
            .pairs()
            .map(|(a, b)| a.powi(r_i) * indicator(a, r_h) * b.powi(l_i) * indicator(b, r_h)),
    );
    Ok(h.powf(1.0 - f64::from(r + l) / 2.0) * sum)
}

/// `h^{-1} Σ_{j=1}^{n-1} (Δ_j X¹)⋆ (Δ_{j+1} X¹)⋆ (Δ_j X²)⋆ (Δ_{j+1} X²)⋆`.
pub fn threshold_adjacent_cross(panel: &SyncPanel, r_h: f64, h: f64) -> Result<f64> {
    if panel.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "adjacent cross statistic needs at least 2 intervals, got {}",
            panel.len()
        )));
    }
    check_r_h(r_h)?;
    check_mesh(h)?;
    let x = panel.returns1();
    let y = panel.returns2();
    let sum = compensated_sum((0..panel.len() - 1).map(|j| {
        truncate(x[j], r_h)
            * truncate(x[j + 1], r_h)
            * truncate(y[j], r_h)
            * truncate(y[j + 1], r_h)
    }));
    Ok(sum / h)
}

/// Estimate of `∫ (1 + ρ²) (σ¹)² (σ²)² dt`, the asymptotic variance of the
/// truncated covariation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvarEstimate {
    pub value: f64,
    /// Set when `ṽ_{2,2} - w̃` came out negative and was clamped to 0.
    pub clamped: bool,
}

impl AvarEstimate {
    pub fn from_parts(cross_power_22: f64, adjacent_cross: f64) -> Self {
        let raw = cross_power_22 - adjacent_cross;
        if raw < 0.0 {
            Self {
                value: 0.0,
                clamped: true,
            }
        } else {
            Self {
                value: raw,
                clamped: false,
            }
        }
    }

    /// Usable as a denominator.
    pub fn is_positive(&self) -> bool {
        self.value > 0.0
    }
}

pub fn avar_ic(panel: &SyncPanel, r_h: f64, h: f64) -> Result<AvarEstimate> {
    let v22 = threshold_cross_power(panel, 2, 2, r_h, h)?;
    let w = threshold_adjacent_cross(panel, r_h, h)?;
    Ok(AvarEstimate::from_parts(v22, w))
}

/// `(ic_hat - ic_true) / (sqrt(h) sqrt(avar))`, asymptotically N(0, 1).
pub fn standardized_ic_error(ic_hat: f64, ic_true: f64, avar: f64, h: f64) -> Result<f64> {
    check_mesh(h)?;
    if !(avar > 0.0) {
        return Err(Error::Degenerate(format!(
            "asymptotic variance estimate is {avar}; standardized error undefined"
        )));
    }
    Ok((ic_hat - ic_true) / (h.sqrt() * avar.sqrt()))
}

/// Standard error `sqrt(h · avar)` of the truncated covariation.
pub fn ic_standard_error(avar: f64, h: f64) -> Result<f64> {
    check_mesh(h)?;
    if !(avar > 0.0) {
        return Err(Error::Degenerate(format!(
            "asymptotic variance estimate is {avar}; standard error undefined"
        )));
    }
    Ok((h * avar).sqrt())
}

/// Regression coefficients and correlation. `None` marks an undefined ratio
/// (zero denominator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaRho {
    /// `IC / IV²`: regression of X¹ on X².
    pub beta12: Option<f64>,
    /// `IC / IV¹`: regression of X² on X¹.
    pub beta21: Option<f64>,
    pub rho: Option<f64>,
}

pub fn beta_rho(ic: f64, iv1: f64, iv2: f64) -> BetaRho {
    let ratio = |den: f64| if den > 0.0 { Some(ic / den) } else { None };
    let rho = if iv1 > 0.0 && iv2 > 0.0 {
        // Cauchy-Schwarz guarantees |ρ| <= 1; clamp only absorbs rounding.
        Some((ic / (iv1.sqrt() * iv2.sqrt())).clamp(-1.0, 1.0))
    } else {
        None
    };
    BetaRho {
        beta12: ratio(iv2),
        beta21: ratio(iv1),
        rho,
    }
}

/// Fraction of increments (over both series) exceeding the threshold.
pub fn truncated_fraction(panel: &SyncPanel, r_h: f64) -> f64 {
    if panel.is_empty() {
        return 0.0;
    }
    let cut = panel
        .returns1()
        .iter()
        .chain(panel.returns2())
        .filter(|x| *x * *x > r_h)
        .count();
    cut as f64 / (2 * panel.len()) as f64
}

/// Accumulates the truncated covariation in a caller-visible order; used by
/// the asynchronous estimator so both routes add terms identically.
pub(crate) fn accumulate_products<I: IntoIterator<Item = (f64, f64)>>(terms: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for (a, b) in terms {
        acc.add(a * b);
    }
    acc.value()
}
