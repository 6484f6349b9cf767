//! Per-path evaluation and the Monte Carlo driver.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{normal_qq, Aggregate, NormalStats};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_with_threshold, single_cojumps, truncated_fraction, CojumpVariant,
    CovariationEstimates,
};
use crate::simulate::{build_paths, ModelConfig, PathBundle, RngSeed};
use crate::threshold::ThresholdSpec;

/// How the covariation error is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasKind {
    /// `100 (ÎC - IC) / IC`.
    Relative,
    /// `ÎC - IC`, used when the true covariation is identically 0.
    Absolute,
}

impl BiasKind {
    pub fn for_model(model: &ModelConfig) -> Self {
        let rho = match model {
            ModelConfig::Model1(c) => c.rho,
            ModelConfig::Model2(c) => c.rho,
        };
        if rho == 0.0 {
            BiasKind::Absolute
        } else {
            BiasKind::Relative
        }
    }

    pub fn bias(self, estimate: f64, truth: f64) -> Option<f64> {
        match self {
            BiasKind::Relative => relative_bias(estimate, truth),
            BiasKind::Absolute => Some(estimate - truth),
        }
    }
}

/// `100 (estimate - truth) / truth`; `None` when the truth is 0.
pub fn relative_bias(estimate: f64, truth: f64) -> Option<f64> {
    (truth != 0.0).then(|| 100.0 * (estimate - truth) / truth)
}

/// Single co-jump estimates on the interval with the largest true co-jump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargestCojump {
    pub interval: usize,
    pub truth: f64,
    pub estimates: [f64; 3],
    /// Percent relative bias per variant, indexed like `estimates`.
    pub relative_bias: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub path_index: u64,
    pub ic_true: f64,
    pub ic_hat: f64,
    pub qcov: f64,
    pub iv1_hat: f64,
    pub iv2_hat: f64,
    pub rho_hat: Option<f64>,
    pub avar_hat: f64,
    pub avar_clamped: bool,
    /// ÎC error in the run's [`BiasKind`].
    pub ic_bias: Option<f64>,
    /// Same error for the plain realized covariation.
    pub unthresholded_bias: Option<f64>,
    pub normalized_bias: Option<f64>,
    pub cojump_true: f64,
    pub cojump_hat: f64,
    pub cojump_relative_bias: Option<f64>,
    pub truncated_fraction: f64,
    pub largest_cojump: Option<LargestCojump>,
    pub failure: Option<String>,
}

impl PathRecord {
    fn failed(path_index: u64, err: &Error) -> Self {
        Self {
            path_index,
            ic_true: f64::NAN,
            ic_hat: f64::NAN,
            qcov: f64::NAN,
            iv1_hat: f64::NAN,
            iv2_hat: f64::NAN,
            rho_hat: None,
            avar_hat: f64::NAN,
            avar_clamped: false,
            ic_bias: None,
            unthresholded_bias: None,
            normalized_bias: None,
            cojump_true: f64::NAN,
            cojump_hat: f64::NAN,
            cojump_relative_bias: None,
            truncated_fraction: f64::NAN,
            largest_cojump: None,
            failure: Some(err.to_string()),
        }
    }
}

fn largest_cojump(
    bundle: &PathBundle,
    est_r_h: f64,
    step: u32,
    panel: &crate::SyncPanel,
) -> Result<Option<LargestCojump>> {
    let truths = bundle.interval_cojump_truths(step)?;
    let Some((j, &truth)) = truths
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    else {
        return Ok(None);
    };
    if truth == 0.0 {
        return Ok(None);
    }
    let single = single_cojumps(panel, est_r_h)?;
    let estimates = single.intervals[j].estimates;
    Ok(Some(LargestCojump {
        interval: j + 1,
        truth,
        estimates,
        relative_bias: estimates.map(|e| 100.0 * (e - truth) / truth),
    }))
}

/// Estimates on the coarse panel of `bundle` compared with its truths.
pub fn evaluate_path(
    bundle: &PathBundle,
    path_index: u64,
    spec: &ThresholdSpec,
    kind: BiasKind,
) -> Result<PathRecord> {
    let panel = bundle.coarse_panel()?;
    let h = panel.mesh();
    let r_h = spec.threshold(h)?;
    let est: CovariationEstimates = estimate_with_threshold(&panel, r_h, h)?;
    let truths = bundle.truths;
    let normalized_bias = if est.avar_hat > 0.0 {
        est.standardized_error(truths.ic).ok()
    } else {
        None
    };
    Ok(PathRecord {
        path_index,
        ic_true: truths.ic,
        ic_hat: est.ic_hat,
        qcov: est.qcov,
        iv1_hat: est.iv1_hat,
        iv2_hat: est.iv2_hat,
        rho_hat: est.rho_hat,
        avar_hat: est.avar_hat,
        avar_clamped: est.avar_clamped,
        ic_bias: kind.bias(est.ic_hat, truths.ic),
        unthresholded_bias: kind.bias(est.qcov, truths.ic),
        normalized_bias,
        cojump_true: truths.cojump_sum,
        cojump_hat: est.cojump_sum,
        cojump_relative_bias: relative_bias(est.cojump_sum, truths.cojump_sum),
        truncated_fraction: truncated_fraction(&panel, r_h),
        largest_cojump: largest_cojump(bundle, r_h, bundle.sampling.coarse_step_seconds, &panel)?,
        failure: None,
    })
}

/// Aggregates over a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasSummary {
    pub schema_version: u32,
    pub model: String,
    pub c: f64,
    pub beta: f64,
    pub h: f64,
    pub r_h: f64,
    pub master_seed: u64,
    pub n_paths: usize,
    pub completed: usize,
    pub failures: usize,
    pub bias_kind: BiasKind,
    pub ic_bias: Option<Aggregate>,
    pub unthresholded_bias: Option<Aggregate>,
    /// Paired per-path difference ÎC bias minus realized-covariation bias.
    pub paired_difference: Option<Aggregate>,
    pub normalized_bias: Option<Aggregate>,
    /// Paths where the variance estimate was 0 (normalized bias undefined).
    pub undefined_normalized: usize,
    pub avar_clamped: usize,
    pub cojump_bias: Option<Aggregate>,
    /// Paths without any true co-jump, left out of `cojump_bias`.
    pub cojump_excluded: usize,
    /// Largest-interval single co-jump bias for variants 5, 6, 7.
    pub variant_bias: [Option<Aggregate>; 3],
    pub mean_truncated_fraction: f64,
    #[serde(skip)]
    pub records: Vec<PathRecord>,
}

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

impl BiasSummary {
    pub fn from_records(
        model: &ModelConfig,
        spec: &ThresholdSpec,
        master_seed: u64,
        kind: BiasKind,
        records: Vec<PathRecord>,
    ) -> Result<Self> {
        let h = model.sampling().coarse_grid()?.mesh();
        let ok: Vec<&PathRecord> = records.iter().filter(|r| r.failure.is_none()).collect();
        let collect = |f: &dyn Fn(&PathRecord) -> Option<f64>| -> Vec<f64> {
            ok.iter().filter_map(|r| f(r)).collect()
        };
        let ic = collect(&|r| r.ic_bias);
        let plain = collect(&|r| r.unthresholded_bias);
        let paired = collect(&|r| Some(r.ic_bias? - r.unthresholded_bias?));
        let normalized = collect(&|r| r.normalized_bias);
        let cojump = collect(&|r| r.cojump_relative_bias);
        let variant_bias = CojumpVariant::ALL.map(|v| {
            let vals = collect(&|r| {
                r.largest_cojump
                    .as_ref()
                    .map(|l| l.relative_bias[v.index()])
            });
            Aggregate::from_values(&vals)
        });
        let fractions = collect(&|r| Some(r.truncated_fraction));
        Ok(Self {
            schema_version: SUMMARY_SCHEMA_VERSION,
            model: model.name().to_string(),
            c: spec.c(),
            beta: spec.beta(),
            h,
            r_h: spec.threshold(h)?,
            master_seed,
            n_paths: records.len(),
            completed: ok.len(),
            failures: records.len() - ok.len(),
            bias_kind: kind,
            ic_bias: Aggregate::from_values(&ic),
            unthresholded_bias: Aggregate::from_values(&plain),
            paired_difference: Aggregate::from_values(&paired),
            normalized_bias: Aggregate::from_values(&normalized),
            undefined_normalized: ok.len() - normalized.len(),
            avar_clamped: ok.iter().filter(|r| r.avar_clamped).count(),
            cojump_excluded: ok.len() - cojump.len(),
            cojump_bias: Aggregate::from_values(&cojump),
            variant_bias,
            mean_truncated_fraction: Aggregate::from_values(&fractions).map_or(0.0, |a| a.mean),
            records,
        })
    }

    pub fn normalized_values(&self) -> Vec<f64> {
        self.records
            .iter()
            .filter_map(|r| r.normalized_bias)
            .collect()
    }

    /// Per-path CSV.
    pub fn write_records_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record([
            "path_index",
            "ic_true",
            "ic_hat",
            "qcov",
            "iv1_hat",
            "iv2_hat",
            "rho_hat",
            "avar_hat",
            "avar_clamped",
            "ic_bias",
            "unthresholded_bias",
            "normalized_bias",
            "cojump_true",
            "cojump_hat",
            "cojump_relative_bias",
            "truncated_fraction",
            "largest_cojump_interval",
            "largest_cojump_truth",
            "variant5_bias",
            "variant6_bias",
            "variant7_bias",
            "failure",
        ])?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.records {
            let lc = r.largest_cojump.as_ref();
            wtr.write_record([
                r.path_index.to_string(),
                format!("{:e}", r.ic_true),
                format!("{:e}", r.ic_hat),
                format!("{:e}", r.qcov),
                format!("{:e}", r.iv1_hat),
                format!("{:e}", r.iv2_hat),
                opt(r.rho_hat),
                format!("{:e}", r.avar_hat),
                r.avar_clamped.to_string(),
                opt(r.ic_bias),
                opt(r.unthresholded_bias),
                opt(r.normalized_bias),
                format!("{:e}", r.cojump_true),
                format!("{:e}", r.cojump_hat),
                opt(r.cojump_relative_bias),
                format!("{:e}", r.truncated_fraction),
                lc.map(|l| l.interval.to_string()).unwrap_or_default(),
                opt(lc.map(|l| l.truth)),
                opt(lc.map(|l| l.relative_bias[0])),
                opt(lc.map(|l| l.relative_bias[1])),
                opt(lc.map(|l| l.relative_bias[2])),
                r.failure.clone().unwrap_or_default(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

pub(crate) fn check_paths(n_paths: usize) -> Result<()> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be at least 1".into()));
    }
    Ok(())
}

/// Simulates `n_paths` paths (path `i` uses stream `(master_seed, i)`) and
/// summarizes the estimators against the recorded truths. Runs on the
/// current rayon pool; the result does not depend on its size.
pub fn run_monte_carlo(
    model: &ModelConfig,
    spec: &ThresholdSpec,
    n_paths: usize,
    master_seed: u64,
) -> Result<BiasSummary> {
    check_paths(n_paths)?;
    model.validate()?;
    let kind = BiasKind::for_model(model);
    let records: Vec<PathRecord> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            build_paths(model, RngSeed::new(master_seed, i))
                .and_then(|b| evaluate_path(&b, i, spec, kind))
                .unwrap_or_else(|e| PathRecord::failed(i, &e))
        })
        .collect();
    BiasSummary::from_records(model, spec, master_seed, kind, records)
}

/// Mean, std and QQ pairs of the normalized bias.
pub fn normalized_bias_stats(summary: &BiasSummary, points: usize) -> Result<NormalStats> {
    normal_qq(&summary.normalized_values(), points)
}

/// Largest-interval single co-jump errors for each variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantStudy {
    pub model: String,
    pub paths: usize,
    /// Paths without any true co-jump.
    pub excluded: usize,
    pub variants: Vec<VariantBias>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantBias {
    pub variant: CojumpVariant,
    pub bias: Aggregate,
}

impl VariantStudy {
    pub fn get(&self, variant: CojumpVariant) -> Option<&Aggregate> {
        self.variants
            .iter()
            .find(|v| v.variant == variant)
            .map(|v| &v.bias)
    }
}

pub fn cojump_variant_study(
    model: &ModelConfig,
    spec: &ThresholdSpec,
    n_paths: usize,
    master_seed: u64,
) -> Result<VariantStudy> {
    if !model.has_jumps() {
        return Err(Error::InvalidArgument(
            "co-jump study needs a model with jumps".into(),
        ));
    }
    let summary = run_monte_carlo(model, spec, n_paths, master_seed)?;
    summary_variant_study(&summary)
}

/// Extracts the co-jump variant comparison from an existing run.
pub fn summary_variant_study(summary: &BiasSummary) -> Result<VariantStudy> {
    let with = summary
        .records
        .iter()
        .filter(|r| r.largest_cojump.is_some())
        .count();
    let variants = CojumpVariant::ALL
        .iter()
        .zip(&summary.variant_bias)
        .filter_map(|(v, agg)| agg.clone().map(|bias| VariantBias { variant: *v, bias }))
        .collect::<Vec<_>>();
    if variants.is_empty() {
        return Err(Error::Degenerate("no path produced a co-jump".into()));
    }
    Ok(VariantStudy {
        model: summary.model.clone(),
        paths: with,
        excluded: summary.completed - with,
        variants,
    })
}
