//! Sample summaries and normal QQ pairs.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// Probabilities reported in every [`Aggregate`].
pub const SUMMARY_PROBS: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub mean: f64,
    /// Mean of absolute values.
    pub mean_abs: f64,
    pub median: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for one value.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// `(p, quantile)` at [`SUMMARY_PROBS`].
    pub quantiles: Vec<(f64, f64)>,
}

impl Aggregate {
    /// `None` for an empty sample.
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = compensated_sum(values.iter().copied()) / n;
        let mean_abs = compensated_sum(values.iter().map(|v| v.abs())) / n;
        let std = if values.len() > 1 {
            (compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let sorted = sorted_copy(values);
        Some(Self {
            count: values.len(),
            mean,
            mean_abs,
            median: quantile_sorted(&sorted, 0.5),
            std,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            quantiles: SUMMARY_PROBS
                .iter()
                .map(|&p| (p, quantile_sorted(&sorted, p)))
                .collect(),
        })
    }
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(values: &[f64], p: f64) -> f64 {
    quantile_sorted(&sorted_copy(values), p)
}

pub fn standard_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub p: f64,
    pub empirical: f64,
    pub normal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    /// Zero sample spread; QQ pairs are meaningless.
    pub degenerate: bool,
    pub qq: Vec<QqPoint>,
}

impl NormalStats {
    /// Empirical minus normal quantile at probability `p` (must be on the
    /// QQ grid).
    pub fn quantile_gap(&self, p: f64) -> Option<f64> {
        self.qq
            .iter()
            .find(|q| (q.p - p).abs() < 1e-9)
            .map(|q| q.empirical - q.normal)
    }
}

/// Mean, std and `points` QQ pairs at probabilities `k / (points + 1)`.
pub fn normal_qq(values: &[f64], points: usize) -> Result<NormalStats> {
    if values.len() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 defined values, got {}",
            values.len()
        )));
    }
    let agg = Aggregate::from_values(values).expect("non-empty");
    let sorted = sorted_copy(values);
    let qq = (1..=points)
        .map(|k| {
            let p = k as f64 / (points + 1) as f64;
            QqPoint {
                p,
                empirical: quantile_sorted(&sorted, p),
                normal: standard_normal_quantile(p),
            }
        })
        .collect();
    Ok(NormalStats {
        count: values.len(),
        mean: agg.mean,
        std: agg.std,
        degenerate: agg.std == 0.0,
        qq,
    })
}
