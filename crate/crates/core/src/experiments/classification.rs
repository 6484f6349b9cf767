//! Jump detection accuracy across sampling frequencies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::monte_carlo::check_paths;
use crate::error::{Error, Result};
use crate::estimators::classify_jump_intervals;
use crate::simulate::{build_paths, Component, ModelConfig, RngSeed};
use crate::threshold::ThresholdSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRate {
    pub step_seconds: u32,
    pub h: f64,
    pub r_h: f64,
    /// Intervals examined, both components pooled.
    pub intervals: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

impl ClassificationRate {
    pub fn misclassified(&self) -> u64 {
        self.false_positives + self.false_negatives
    }

    pub fn rate(&self) -> f64 {
        self.misclassified() as f64 / self.intervals as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationStudy {
    pub model: String,
    pub n_paths: usize,
    pub master_seed: u64,
    pub rates: Vec<ClassificationRate>,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    intervals: u64,
    fp: u64,
    fneg: u64,
}

/// For each sampling step, flags intervals with `(Δ X)² > r_h` and compares
/// them with the intervals that truly contain a jump. Every step reuses the
/// same paths. Only finite-activity models record jump times.
pub fn jump_classification_study(
    model: &ModelConfig,
    spec: &ThresholdSpec,
    steps: &[u32],
    n_paths: usize,
    master_seed: u64,
) -> Result<ClassificationStudy> {
    check_paths(n_paths)?;
    model.validate()?;
    if !matches!(model, ModelConfig::Model1(_)) {
        return Err(Error::InvalidArgument(
            "jump classification needs recorded jump times (model1)".into(),
        ));
    }
    if steps.is_empty() {
        return Err(Error::InvalidArgument("no sampling steps given".into()));
    }
    let sampling = model.sampling();
    let mut meta = Vec::with_capacity(steps.len());
    for &s in steps {
        let h = sampling.grid_for_step(s)?.mesh();
        meta.push((s, h, spec.threshold(h)?));
    }
    let per_path: Vec<Vec<Counts>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<Counts>> {
            let bundle = build_paths(model, RngSeed::new(master_seed, i))?;
            meta.iter()
                .map(|&(s, _, r_h)| {
                    let panel = bundle.panel(s)?;
                    let mut c = Counts::default();
                    for (comp, returns) in [
                        (Component::First, panel.returns1()),
                        (Component::Second, panel.returns2()),
                    ] {
                        let flagged = classify_jump_intervals(returns, r_h)?;
                        let truth = bundle.true_jump_intervals(comp, s)?;
                        for (f, t) in flagged.iter().zip(&truth) {
                            c.intervals += 1;
                            c.fp += u64::from(*f && !*t);
                            c.fneg += u64::from(!*f && *t);
                        }
                    }
                    Ok(c)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rates = meta
        .iter()
        .enumerate()
        .map(|(k, &(step_seconds, h, r_h))| {
            let total = per_path.iter().fold(Counts::default(), |acc, p| Counts {
                intervals: acc.intervals + p[k].intervals,
                fp: acc.fp + p[k].fp,
                fneg: acc.fneg + p[k].fneg,
            });
            ClassificationRate {
                step_seconds,
                h,
                r_h,
                intervals: total.intervals,
                false_positives: total.fp,
                false_negatives: total.fneg,
            }
        })
        .collect();
    Ok(ClassificationStudy {
        model: model.name().to_string(),
        n_paths,
        master_seed,
        rates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{Model1Config, Model2Config};

    #[test]
    fn counts_cover_every_interval() {
        let model = ModelConfig::Model1(Model1Config::default().with_intensity(1.0));
        let s =
            jump_classification_study(&model, &ThresholdSpec::default(), &[300, 60], 3, 4).unwrap();
        assert_eq!(s.rates[0].intervals, 3 * 2 * 84);
        assert_eq!(s.rates[1].intervals, 3 * 2 * 420);
        assert!(s.rates.iter().all(|r| r.rate() <= 1.0));
    }

    #[test]
    fn rejects_infinite_activity_and_bad_steps() {
        let spec = ThresholdSpec::default();
        let m2 = ModelConfig::Model2(Model2Config::placeholder());
        assert!(jump_classification_study(&m2, &spec, &[300], 1, 1).is_err());
        let m1 = ModelConfig::Model1(Model1Config::default());
        assert!(jump_classification_study(&m1, &spec, &[], 1, 1).is_err());
        assert!(jump_classification_study(&m1, &spec, &[11], 1, 1).is_err());
    }
}
