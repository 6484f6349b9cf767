//! Threshold sweeps over a `(c, β)` grid with common random numbers.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::monte_carlo::{check_paths, BiasKind};
use super::stats::Aggregate;
use crate::error::{Error, Result};
use crate::estimators::{realized_covariation, threshold_ic};
use crate::simulate::{build_paths, ModelConfig, RngSeed};
use crate::threshold::ThresholdSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub cs: Vec<f64>,
    pub betas: Vec<f64>,
}

/// `start, start + step, ...` up to `end` inclusive, rounded to 1e-10 to
/// keep the grid values tidy.
fn arithmetic(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10)
        .collect()
}

impl Default for SweepGrid {
    /// `c = 0.1, 0.6, ..., 5.6` and `β = 0.05, 0.10, ..., 0.90, 0.99`.
    fn default() -> Self {
        let mut betas = arithmetic(0.05, 0.90, 0.05);
        betas.push(0.99);
        Self {
            cs: arithmetic(0.1, 5.6, 0.5),
            betas,
        }
    }
}

impl SweepGrid {
    pub fn new(cs: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        let grid = Self { cs, betas };
        grid.validate()?;
        Ok(grid)
    }

    pub fn single(spec: ThresholdSpec) -> Self {
        Self {
            cs: vec![spec.c()],
            betas: vec![spec.beta()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cs.is_empty() || self.betas.is_empty() {
            return Err(Error::InvalidArgument(
                "sweep grid must not be empty".into(),
            ));
        }
        for &c in &self.cs {
            for &beta in &self.betas {
                ThresholdSpec::new(c, beta)?;
            }
        }
        Ok(())
    }

    pub fn specs(&self) -> impl Iterator<Item = ThresholdSpec> + '_ {
        self.cs.iter().flat_map(move |&c| {
            self.betas
                .iter()
                .map(move |&beta| ThresholdSpec::new(c, beta).expect("validated grid"))
        })
    }

    pub fn cells(&self) -> usize {
        self.cs.len() * self.betas.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub model: String,
    pub master_seed: u64,
    pub n_paths: usize,
    pub failures: usize,
    pub bias_kind: BiasKind,
    pub grid: SweepGrid,
    /// `mean_bias[i][j]`: mean ÎC error at `(cs[i], betas[j])`.
    pub mean_bias: Vec<Vec<f64>>,
    /// Mean error of the plain realized covariation on the same paths.
    pub unthresholded_mean_bias: f64,
}

impl SweepResult {
    pub fn get(&self, c: f64, beta: f64) -> Option<f64> {
        let i = self.grid.cs.iter().position(|&x| (x - c).abs() < 1e-9)?;
        let j = self
            .grid
            .betas
            .iter()
            .position(|&x| (x - beta).abs() < 1e-9)?;
        Some(self.mean_bias[i][j])
    }

    /// Matrix CSV: header `c,<β values>`, one row per `c`.
    pub fn write_matrix_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["c".to_string()];
        header.extend(self.grid.betas.iter().map(|b| b.to_string()));
        wtr.write_record(&header)?;
        for (c, row) in self.grid.cs.iter().zip(&self.mean_bias) {
            let mut rec = vec![c.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:e}")));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

struct PathCells {
    ic_true: f64,
    qcov: f64,
    ic_hats: Vec<f64>,
}

/// Mean ÎC error for every grid cell, all cells evaluated on the same
/// simulated paths.
pub fn sweep_thresholds(
    model: &ModelConfig,
    grid: &SweepGrid,
    n_paths: usize,
    master_seed: u64,
) -> Result<SweepResult> {
    check_paths(n_paths)?;
    grid.validate()?;
    model.validate()?;
    let kind = BiasKind::for_model(model);
    let specs: Vec<ThresholdSpec> = grid.specs().collect();
    let per_path: Vec<Option<PathCells>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| -> Result<PathCells> {
            let bundle = build_paths(model, RngSeed::new(master_seed, i))?;
            let panel = bundle.coarse_panel()?;
            let h = panel.mesh();
            let ic_hats = specs
                .iter()
                .map(|s| threshold_ic(&panel, s.threshold(h)?))
                .collect::<Result<Vec<_>>>()?;
            Ok(PathCells {
                ic_true: bundle.truths.ic,
                qcov: realized_covariation(&panel),
                ic_hats,
            })
        })
        .map(Result::ok)
        .collect();
    let ok: Vec<&PathCells> = per_path.iter().flatten().collect();
    if ok.is_empty() {
        return Err(Error::Degenerate("every sweep path failed".into()));
    }
    let mean_of = |vals: Vec<f64>| Aggregate::from_values(&vals).map_or(f64::NAN, |a| a.mean);
    let flat: Vec<f64> = (0..specs.len())
        .map(|k| {
            mean_of(
                ok.iter()
                    .filter_map(|p| kind.bias(p.ic_hats[k], p.ic_true))
                    .collect(),
            )
        })
        .collect();
    let mean_bias = flat.chunks(grid.betas.len()).map(<[f64]>::to_vec).collect();
    Ok(SweepResult {
        model: model.name().to_string(),
        master_seed,
        n_paths,
        failures: n_paths - ok.len(),
        bias_kind: kind,
        grid: grid.clone(),
        mean_bias,
        unthresholded_mean_bias: mean_of(
            ok.iter()
                .filter_map(|p| kind.bias(p.qcov, p.ic_true))
                .collect(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run_monte_carlo;
    use crate::simulate::Model1Config;

    #[test]
    fn default_grid_shape() {
        let g = SweepGrid::default();
        assert_eq!(g.cs.len(), 12);
        assert_eq!(g.betas.len(), 19);
        assert_eq!(g.cells(), 228);
        assert_eq!(g.cs[0], 0.1);
        assert_eq!(g.cs[11], 5.6);
        assert_eq!(g.betas[0], 0.05);
        assert_eq!(g.betas[17], 0.9);
        assert_eq!(g.betas[18], 0.99);
        g.validate().unwrap();
        assert!(SweepGrid::new(vec![0.1], vec![1.0]).is_err());
        assert!(SweepGrid::new(vec![], vec![0.5]).is_err());
    }

    #[test]
    fn single_cell_matches_monte_carlo() {
        let model = ModelConfig::Model1(Model1Config::default());
        let spec = ThresholdSpec::new(0.6, 0.7).unwrap();
        let sweep = sweep_thresholds(&model, &SweepGrid::single(spec), 6, 8).unwrap();
        let mc = run_monte_carlo(&model, &spec, 6, 8).unwrap();
        assert_eq!(sweep.mean_bias[0][0], mc.ic_bias.unwrap().mean);
        assert_eq!(
            sweep.unthresholded_mean_bias,
            mc.unthresholded_bias.unwrap().mean
        );
    }

    #[test]
    fn loose_corner_approaches_unthresholded() {
        // with λ = 0 and a huge threshold nothing is truncated
        let model = ModelConfig::Model1(Model1Config::default().with_intensity(0.0));
        let grid = SweepGrid::new(vec![5.6], vec![0.05]).unwrap();
        let s = sweep_thresholds(&model, &grid, 5, 2).unwrap();
        assert_eq!(s.mean_bias[0][0], s.unthresholded_mean_bias);
        let mut buf = Vec::new();
        s.write_matrix_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("c,0.05\n5.6,"));
    }
}
