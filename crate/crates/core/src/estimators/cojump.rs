//! Co-jump estimators and jump-interval classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::SyncPanel;
use crate::sum::compensated_sum;
use crate::threshold::check_r_h;

use super::sync::{realized_covariation, threshold_ic, truncate};

/// Sum of co-jumps: realized covariation minus its truncated part.
pub fn cojump_sum(panel: &SyncPanel, r_h: f64) -> Result<f64> {
    Ok(realized_covariation(panel) - threshold_ic(panel, r_h)?)
}

/// Per-interval estimators of `ΔJ¹ ΔJ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CojumpVariant {
    /// `Δ¹Δ² - (Δ¹)⋆(Δ²)⋆`: what the truncated covariation leaves out.
    Residual,
    /// `Δ¹ 1{(Δ¹)² > r_h} Δ² 1{(Δ²)² > r_h}`: both legs flagged as jumps.
    BothExceed,
    /// `Δ¹Δ²`: the raw cross product.
    Raw,
}

impl CojumpVariant {
    pub const ALL: [CojumpVariant; 3] = [Self::Residual, Self::BothExceed, Self::Raw];

    /// Conventional numbering: 5 residual, 6 both legs exceed, 7 raw.
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            5 => Ok(Self::Residual),
            6 => Ok(Self::BothExceed),
            7 => Ok(Self::Raw),
            _ => Err(Error::InvalidArgument(format!(
                "unknown co-jump estimator variant {n} (expected 5, 6 or 7)"
            ))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::Residual => 5,
            Self::BothExceed => 6,
            Self::Raw => 7,
        }
    }

    pub fn index(self) -> usize {
        self.number() as usize - 5
    }

    pub fn estimate(self, a: f64, b: f64, r_h: f64) -> f64 {
        match self {
            Self::Residual => a * b - truncate(a, r_h) * truncate(b, r_h),
            Self::BothExceed => {
                if a * a > r_h && b * b > r_h {
                    a * b
                } else {
                    0.0
                }
            }
            Self::Raw => a * b,
        }
    }
}

impl fmt::Display for CojumpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "variant{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalCojump {
    /// 1-based interval index `j` of `]t_{j-1}, t_j]`.
    pub interval: usize,
    /// Estimates indexed by [`CojumpVariant::index`].
    pub estimates: [f64; 3],
    /// A jump is suspected in at least one of the two processes.
    pub flagged: bool,
}

impl IntervalCojump {
    pub fn get(&self, variant: CojumpVariant) -> f64 {
        self.estimates[variant.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CojumpEstimates {
    pub r_h: f64,
    pub intervals: Vec<IntervalCojump>,
}

impl CojumpEstimates {
    pub fn series(&self, variant: CojumpVariant) -> Vec<f64> {
        self.intervals.iter().map(|c| c.get(variant)).collect()
    }

    pub fn total(&self, variant: CojumpVariant) -> f64 {
        compensated_sum(self.intervals.iter().map(|c| c.get(variant)))
    }
}

/// All three single co-jump estimates on every interval.
pub fn single_cojumps(panel: &SyncPanel, r_h: f64) -> Result<CojumpEstimates> {
    check_r_h(r_h)?;
    let intervals = panel
        .pairs()
        .enumerate()
        .map(|(j, (a, b))| IntervalCojump {
            interval: j + 1,
            estimates: CojumpVariant::ALL.map(|v| v.estimate(a, b, r_h)),
            flagged: a * a > r_h || b * b > r_h,
        })
        .collect();
    Ok(CojumpEstimates { r_h, intervals })
}

/// One variant's per-interval co-jump estimates.
pub fn single_cojump(panel: &SyncPanel, r_h: f64, variant: CojumpVariant) -> Result<Vec<f64>> {
    check_r_h(r_h)?;
    Ok(panel
        .pairs()
        .map(|(a, b)| variant.estimate(a, b, r_h))
        .collect())
}

/// `true` where `(Δ_j X)² > r_h`, i.e. a jump is suspected in interval `j`.
pub fn classify_jump_intervals(returns: &[f64], r_h: f64) -> Result<Vec<bool>> {
    check_r_h(r_h)?;
    Ok(returns.iter().map(|x| x * x > r_h).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn example() -> SyncPanel {
        SyncPanel::uniform(1.0, vec![0.012, -0.02, 0.005], vec![0.02, 0.01, 0.01]).unwrap()
    }

    #[test]
    fn cojump_sum_example() {
        assert_relative_eq!(
            cojump_sum(&example(), 2.5e-4).unwrap(),
            4.0e-5,
            max_relative = 1e-10
        );
        assert_eq!(cojump_sum(&example(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn variants_when_both_below() {
        let (a, b) = (0.01, -0.02);
        let r = 1.0;
        assert_eq!(CojumpVariant::Residual.estimate(a, b, r), 0.0);
        assert_eq!(CojumpVariant::BothExceed.estimate(a, b, r), 0.0);
        assert_eq!(CojumpVariant::Raw.estimate(a, b, r), a * b);
    }

    #[test]
    fn variants_when_both_above() {
        let (a, b) = (0.3, -0.2);
        let r = 1e-3;
        for v in CojumpVariant::ALL {
            assert_eq!(v.estimate(a, b, r), a * b, "{v}");
        }
    }

    #[test]
    fn residual_plus_truncated_is_full_product() {
        let r = 2.5e-4;
        for (a, b) in example().pairs() {
            let v5 = CojumpVariant::Residual.estimate(a, b, r);
            assert_eq!(v5 + truncate(a, r) * truncate(b, r), a * b);
        }
    }

    #[test]
    fn variant_numbers() {
        assert_eq!(
            CojumpVariant::from_number(6).unwrap(),
            CojumpVariant::BothExceed
        );
        assert!(CojumpVariant::from_number(4).is_err());
        for v in CojumpVariant::ALL {
            assert_eq!(CojumpVariant::from_number(v.number()).unwrap(), v);
        }
    }

    #[test]
    fn residual_total_matches_cojump_sum() {
        let p = example();
        let est = single_cojumps(&p, 2.5e-4).unwrap();
        assert_relative_eq!(
            est.total(CojumpVariant::Residual),
            cojump_sum(&p, 2.5e-4).unwrap(),
            max_relative = 1e-12
        );
        assert_eq!(est.intervals.len(), 3);
        assert!(est.intervals[0].flagged && est.intervals[1].flagged && !est.intervals[2].flagged);
        assert_eq!(
            single_cojump(&p, 2.5e-4, CojumpVariant::Raw).unwrap(),
            est.series(CojumpVariant::Raw)
        );
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify_jump_intervals(&[0.0; 4], 1e-4).unwrap(),
            vec![false; 4]
        );
        let r: f64 = 1e-4;
        let flags = classify_jump_intervals(&[0.0, 2.0 * r.sqrt(), -0.001], r).unwrap();
        assert_eq!(flags, vec![false, true, false]);
        assert!(classify_jump_intervals(&[0.1], 0.0).is_err());
    }
}
