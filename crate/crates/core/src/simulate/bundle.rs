//! Euler assembly of a bivariate path with its ground truths.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Model1Config, Model2Config, ModelConfig, Sampling};
use super::generators::{
    correlate_jumps, correlated_brownian_increments, simulate_compound_poisson, simulate_sv_path,
    simulate_vg_increments, JumpEvent,
};
use crate::error::{Error, Result};
use crate::grid::{SampledPath, TimeGrid};
use crate::panel::SyncPanel;
use crate::sum::{compensated_sum, CompensatedSum};

/// Identifies the random stream of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub master: u64,
    pub path_index: u64,
}

impl RngSeed {
    pub fn new(master: u64, path_index: u64) -> Self {
        Self { master, path_index }
    }

    /// ChaCha stream `path_index` of the generator keyed by `master`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.path_index);
        rng
    }
}

/// Quantities the estimators target, computed from the simulated inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truths {
    /// `∫ ρ σ¹ σ² dt` as a left-point Riemann sum on the fine grid.
    pub ic: f64,
    pub iv1: f64,
    pub iv2: f64,
    /// `Σ ΔJ¹ ΔJ²` over fine steps.
    pub cojump_sum: f64,
}

/// A compound Poisson jump placed on the fine grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridJump {
    pub time: f64,
    pub size: f64,
    /// 1-based fine step `k` with `time ∈ ]t_{k-1}, t_k]`.
    pub fine_step: usize,
}

/// Jump times of the finite-activity components `J¹` and `J³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    pub j1: Vec<GridJump>,
    pub j3: Vec<GridJump>,
    pub rho_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathBundle {
    pub sampling: Sampling,
    pub grid: TimeGrid,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub j1: Vec<f64>,
    pub j2: Vec<f64>,
    pub sigma1: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// Fine-step jump increments.
    pub dj1: Vec<f64>,
    pub dj2: Vec<f64>,
    pub truths: Truths,
    /// `None` for infinite-activity jumps, where every step moves.
    pub jumps: Option<JumpRecord>,
}

fn place_on_grid(events: &[JumpEvent], dt: f64, n: usize) -> (Vec<f64>, Vec<GridJump>) {
    let mut increments = vec![0.0; n];
    let placed = events
        .iter()
        .map(|e| {
            let k = ((e.time / dt).ceil() as usize).clamp(1, n);
            increments[k - 1] += e.size;
            GridJump {
                time: e.time,
                size: e.size,
                fine_step: k,
            }
        })
        .collect();
    (increments, placed)
}

fn cumulate(increments: &[f64]) -> Vec<f64> {
    let mut level = Vec::with_capacity(increments.len() + 1);
    let mut acc = CompensatedSum::new();
    level.push(0.0);
    for &dx in increments {
        acc.add(dx);
        level.push(acc.value());
    }
    level
}

/// Shared Euler assembly: `D_{k+1} = D_k + a dt + σ_k ΔW_k`, `X = D + J`.
#[allow(clippy::too_many_arguments)]
fn assemble(
    sampling: Sampling,
    drift: f64,
    rho: f64,
    sigma1: Vec<f64>,
    sigma2: Vec<f64>,
    dw1: &[f64],
    dw2: &[f64],
    dj1: Vec<f64>,
    dj2: Vec<f64>,
    jumps: Option<JumpRecord>,
) -> Result<PathBundle> {
    let n = sampling.fine_steps();
    let dt = sampling.fine_dt();
    let grid = sampling.fine_grid()?;
    let dd1: Vec<f64> = (0..n).map(|k| drift * dt + sigma1[k] * dw1[k]).collect();
    let dd2: Vec<f64> = (0..n).map(|k| drift * dt + sigma2[k] * dw2[k]).collect();
    let d1 = cumulate(&dd1);
    let d2 = cumulate(&dd2);
    let j1 = cumulate(&dj1);
    let j2 = cumulate(&dj2);
    let x1: Vec<f64> = d1.iter().zip(&j1).map(|(d, j)| d + j).collect();
    let x2: Vec<f64> = d2.iter().zip(&j2).map(|(d, j)| d + j).collect();
    let truths = Truths {
        ic: compensated_sum((0..n).map(|k| rho * sigma1[k] * sigma2[k] * dt)),
        iv1: compensated_sum((0..n).map(|k| sigma1[k] * sigma1[k] * dt)),
        iv2: compensated_sum((0..n).map(|k| sigma2[k] * sigma2[k] * dt)),
        cojump_sum: compensated_sum(dj1.iter().zip(&dj2).map(|(a, b)| a * b)),
    };
    Ok(PathBundle {
        sampling,
        grid,
        x1,
        x2,
        d1,
        d2,
        j1,
        j2,
        sigma1,
        sigma2,
        dj1,
        dj2,
        truths,
        jumps,
    })
}

fn build_model1(config: &Model1Config, rng: &mut ChaCha8Rng) -> Result<PathBundle> {
    config.validate()?;
    let s = config.sampling;
    let n = s.fine_steps();
    let dt = s.fine_dt();
    let (dw1, dw2) = correlated_brownian_increments(config.rho, dt, n, rng)?;
    let sigma1 = simulate_sv_path(&config.sv1, dt, n, rng)?;
    let sigma2 = simulate_sv_path(&config.sv2, dt, n, rng)?;
    let ev1 = simulate_compound_poisson(config.lambda1, &config.jump_size, s.horizon(), rng)?;
    let ev3 = simulate_compound_poisson(config.lambda3, &config.jump_size, s.horizon(), rng)?;
    let (dj1, j1) = place_on_grid(&ev1, dt, n);
    let (dj3, j3) = place_on_grid(&ev3, dt, n);
    let dj2 = correlate_jumps(&dj1, &dj3, config.rho_j)?;
    let record = JumpRecord {
        j1,
        j3,
        rho_j: config.rho_j,
    };
    assemble(
        s,
        config.drift,
        config.rho,
        sigma1,
        sigma2,
        &dw1,
        &dw2,
        dj1,
        dj2,
        Some(record),
    )
}

fn build_model2(config: &Model2Config, rng: &mut ChaCha8Rng) -> Result<PathBundle> {
    config.validate()?;
    let s = config.sampling;
    let n = s.fine_steps();
    let dt = s.fine_dt();
    let (dw1, dw2) = correlated_brownian_increments(config.rho, dt, n, rng)?;
    let dj1 = simulate_vg_increments(&config.vg1, dt, n, rng)?;
    let dj3 = simulate_vg_increments(&config.vg3, dt, n, rng)?;
    let dj2 = correlate_jumps(&dj1, &dj3, config.rho_j)?;
    assemble(
        s,
        config.drift,
        config.rho,
        vec![config.sigma1; n + 1],
        vec![config.sigma2; n + 1],
        &dw1,
        &dw2,
        dj1,
        dj2,
        None,
    )
}

/// Simulates one bivariate path. `(seed.master, seed.path_index)` fully
/// determines the result.
pub fn build_paths(model: &ModelConfig, seed: RngSeed) -> Result<PathBundle> {
    let mut rng = seed.rng();
    match model {
        ModelConfig::Model1(c) => build_model1(c, &mut rng),
        ModelConfig::Model2(c) => build_model2(c, &mut rng),
    }
}

/// Which observed process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    First,
    Second,
}

impl PathBundle {
    pub fn path1(&self) -> Result<SampledPath> {
        SampledPath::new(self.grid.clone(), self.x1.clone())
    }

    pub fn path2(&self) -> Result<SampledPath> {
        SampledPath::new(self.grid.clone(), self.x2.clone())
    }

    /// Synchronous returns sampled every `step_seconds`.
    pub fn panel(&self, step_seconds: u32) -> Result<SyncPanel> {
        let every = self.sampling.fine_per_step(step_seconds)?;
        let coarse = self.sampling.grid_for_step(step_seconds)?;
        let diff = |x: &[f64]| -> Vec<f64> {
            x.iter()
                .step_by(every)
                .collect::<Vec<_>>()
                .windows(2)
                .map(|w| w[1] - w[0])
                .collect()
        };
        SyncPanel::new(coarse, diff(&self.x1), diff(&self.x2))
    }

    /// The configured coarse panel (5-minute returns by default).
    pub fn coarse_panel(&self) -> Result<SyncPanel> {
        self.panel(self.sampling.coarse_step_seconds)
    }

    /// Per interval of `step_seconds`: the sum of fine-step products
    /// `ΔJ¹ ΔJ²` it contains.
    pub fn interval_cojump_truths(&self, step_seconds: u32) -> Result<Vec<f64>> {
        let every = self.sampling.fine_per_step(step_seconds)?;
        Ok(self
            .dj1
            .chunks(every)
            .zip(self.dj2.chunks(every))
            .map(|(a, b)| compensated_sum(a.iter().zip(b).map(|(x, y)| x * y)))
            .collect())
    }

    /// Intervals of `step_seconds` that contain a jump of the given process.
    /// Only available for finite-activity jumps.
    pub fn true_jump_intervals(
        &self,
        component: Component,
        step_seconds: u32,
    ) -> Result<Vec<bool>> {
        let every = self.sampling.fine_per_step(step_seconds)?;
        let record = self.jumps.as_ref().ok_or_else(|| {
            Error::InvalidArgument("jump times are only recorded for compound Poisson jumps".into())
        })?;
        let n = self.sampling.fine_steps() / every;
        let mut flags = vec![false; n];
        let mut mark = |jumps: &[GridJump]| {
            for j in jumps {
                flags[(j.fine_step - 1) / every] = true;
            }
        };
        match component {
            Component::First => mark(&record.j1),
            Component::Second => {
                if record.rho_j != 0.0 {
                    mark(&record.j1);
                }
                if record.rho_j.abs() != 1.0 {
                    mark(&record.j3);
                }
            }
        }
        Ok(flags)
    }

    /// Fine-grid export: `time,X1,X2,D1,D2,J1,J2,sigma1,sigma2`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record([
            "time", "X1", "X2", "D1", "D2", "J1", "J2", "sigma1", "sigma2",
        ])?;
        for k in 0..self.grid.len() {
            let row = [
                self.grid.times()[k],
                self.x1[k],
                self.x2[k],
                self.d1[k],
                self.d2[k],
                self.j1[k],
                self.j2[k],
                self.sigma1[k],
                self.sigma2[k],
            ];
            wtr.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Coarse levels: `time,X1,X2`.
    pub fn write_coarse_csv<W: Write>(&self, writer: W) -> Result<()> {
        let coarse = self.sampling.coarse_grid()?;
        let p1 = self.path1()?.resample(&coarse)?;
        let p2 = self.path2()?.resample(&coarse)?;
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["time", "X1", "X2"])?;
        for k in 0..coarse.len() {
            let row = [coarse.times()[k], p1.values()[k], p2.values()[k]];
            wtr.write_record(row.iter().map(|v| format!("{v:e}")))?;
        }
        wtr.flush()?;
        Ok(())
    }
}
