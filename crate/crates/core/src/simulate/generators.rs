//! Building blocks: Brownian increments, log-OU volatility, compound
//! Poisson and Variance Gamma jumps.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::config::{JumpSizeLaw, SvParams, VgParams};
use crate::error::{Error, Result};

fn check_step(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )))
    }
}

/// `n` increments of `(W¹, W²)` over steps of length `dt`, with
/// `ΔW² = ρ ΔW¹ + sqrt(1 - ρ²) ΔW³`.
pub fn correlated_brownian_increments<R: Rng + ?Sized>(
    rho: f64,
    dt: f64,
    n: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!(
            "correlation must lie in [-1, 1], got {rho}"
        )));
    }
    check_step(dt)?;
    let sd = dt.sqrt();
    let complement = (1.0 - rho * rho).sqrt();
    let mut dw1 = Vec::with_capacity(n);
    let mut dw2 = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: f64 = rng.sample(StandardNormal);
        let z3: f64 = rng.sample(StandardNormal);
        let w1 = sd * z1;
        dw1.push(w1);
        dw2.push(if rho == 1.0 {
            w1
        } else {
            rho * w1 + complement * sd * z3
        });
    }
    Ok((dw1, dw2))
}

/// Euler path of `σ_t = exp(ℓ_t)` at the `n + 1` grid points. The initial
/// log-volatility is drawn from the stationary law when one exists.
pub fn simulate_sv_path<R: Rng + ?Sized>(
    params: &SvParams,
    dt: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    params.validate("")?;
    check_step(dt)?;
    let level = params.sigma_level.ln();
    if params.vol_of_vol == 0.0 {
        return Ok(vec![params.sigma_level; n + 1]);
    }
    let mut log_vol = match params.stationary_log_sd() {
        Some(sd) => level + sd * rng.sample::<f64, _>(StandardNormal),
        None => level,
    };
    let shock_sd = params.vol_of_vol * dt.sqrt();
    let pull = params.mean_reversion * dt;
    let mut sigma = Vec::with_capacity(n + 1);
    sigma.push(log_vol.exp());
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        log_vol += -pull * (log_vol - level) + shock_sd * z;
        sigma.push(log_vol.exp());
    }
    Ok(sigma)
}

/// A jump of a compound Poisson process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    pub size: f64,
}

/// Jumps on `[0, horizon]`: Poisson(λT) count, uniform times (sorted),
/// i.i.d. Gaussian sizes.
pub fn simulate_compound_poisson<R: Rng + ?Sized>(
    lambda: f64,
    sizes: &JumpSizeLaw,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<JumpEvent>> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "intensity must be >= 0, got {lambda}"
        )));
    }
    sizes.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let mean_count = lambda * horizon;
    if mean_count == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean_count)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .sample(rng) as usize;
    let times = Uniform::new(0.0, horizon).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let size_law =
        Normal::new(sizes.mean, sizes.std).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut events: Vec<JumpEvent> = (0..count)
        .map(|_| JumpEvent {
            time: times.sample(rng),
            size: size_law.sample(rng),
        })
        .collect();
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(events)
}

/// Variance Gamma increments over `n` steps of length `dt`:
/// `ΔG ~ Gamma(shape dt/κ, scale κ)`, `ΔJ = θ ΔG + ς sqrt(ΔG) Z`.
pub fn simulate_vg_increments<R: Rng + ?Sized>(
    params: &VgParams,
    dt: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    params.validate("")?;
    check_step(dt)?;
    let gamma = Gamma::new(dt / params.kappa, params.kappa)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((0..n)
        .map(|_| {
            let dg: f64 = gamma.sample(rng);
            let z: f64 = rng.sample(StandardNormal);
            params.theta * dg + params.varsigma * dg.sqrt() * z
        })
        .collect())
}

/// `ΔJ² = ρ_J ΔJ¹ + sqrt(1 - ρ_J²) ΔJ³`, step by step.
pub fn correlate_jumps(dj1: &[f64], dj3: &[f64], rho_j: f64) -> Result<Vec<f64>> {
    if dj1.len() != dj3.len() {
        return Err(Error::InvalidArgument(format!(
            "jump increments on different grids ({} vs {} steps)",
            dj1.len(),
            dj3.len()
        )));
    }
    if !(-1.0..=1.0).contains(&rho_j) {
        return Err(Error::InvalidArgument(format!(
            "jump correlation must lie in [-1, 1], got {rho_j}"
        )));
    }
    let complement = (1.0 - rho_j * rho_j).sqrt();
    Ok(dj1
        .iter()
        .zip(dj3)
        .map(|(a, b)| match rho_j {
            r if r == 0.0 => *b,
            r if r == 1.0 => *a,
            r => r * a + complement * b,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn sample_corr(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for (a, b) in x.iter().zip(y) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
        }
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn perfect_correlation_copies_increments() {
        let (a, b) = correlated_brownian_increments(1.0, 0.01, 1000, &mut rng(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_correlation_is_independent() {
        let n = 100_000;
        let (a, b) = correlated_brownian_increments(0.0, 1e-3, n, &mut rng(2)).unwrap();
        assert!(sample_corr(&a, &b).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn half_correlation_large_sample() {
        // Fisher-z: sd of atanh(r) is 1/sqrt(n-3) ≈ 0.001; ±0.005 on r ≈ ±6.7 sd.
        let n = 1_000_000;
        let (a, b) = correlated_brownian_increments(0.5, 1.0 / 25_200.0, n, &mut rng(3)).unwrap();
        let r = sample_corr(&a, &b);
        assert!((r - 0.5).abs() < 0.005, "{r}");
        let var: f64 = a.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((var * 25_200.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn bad_correlation_rejected() {
        assert!(correlated_brownian_increments(1.01, 0.1, 10, &mut rng(0)).is_err());
        assert!(correlate_jumps(&[0.0], &[0.0], -1.5).is_err());
    }

    #[test]
    fn constant_vol_without_vol_of_vol() {
        let sv = SvParams {
            vol_of_vol: 0.0,
            ..SvParams::default()
        };
        let path = simulate_sv_path(&sv, 1e-3, 100, &mut rng(4)).unwrap();
        assert_eq!(path.len(), 101);
        assert!(path.iter().all(|&s| s == sv.sigma_level));
        let bad = SvParams {
            sigma_level: 0.0,
            ..SvParams::default()
        };
        assert!(simulate_sv_path(&bad, 1e-3, 10, &mut rng(4)).is_err());
    }

    #[test]
    fn log_vol_stationary_variance() {
        // α = 50, η = 1: stationary variance η²/(2α) = 0.01. With dt = 1e-3 the
        // Euler chain's own stationary variance is η² dt / (1 - (1 - α dt)²)
        // = 0.010256...; both are well inside the tolerance.
        let sv = SvParams {
            mean_reversion: 50.0,
            vol_of_vol: 1.0,
            sigma_level: 0.02,
        };
        let path = simulate_sv_path(&sv, 1e-3, 2_000_000, &mut rng(5)).unwrap();
        let logs: Vec<f64> = path.iter().map(|s| s.ln()).collect();
        let n = logs.len() as f64;
        let mean = logs.iter().sum::<f64>() / n;
        let var = logs.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
        let euler = 1e-3 / (1.0 - (1.0 - 0.05f64).powi(2));
        assert!((mean - 0.02f64.ln()).abs() < 0.01);
        // effective sample size ≈ n·αdt/2 = 5e4 → relative sd of var ≈ 0.6%
        assert!((var / euler - 1.0).abs() < 0.04, "{var} vs {euler}");
    }

    #[test]
    fn no_jumps_without_intensity() {
        let ev = simulate_compound_poisson(0.0, &JumpSizeLaw::default(), 1.0, &mut rng(6)).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn atom_at_zero_rejected() {
        let law = JumpSizeLaw {
            mean: 0.0,
            std: 0.0,
        };
        assert!(simulate_compound_poisson(1.0, &law, 1.0, &mut rng(6)).is_err());
        assert!(
            simulate_compound_poisson(-1.0, &JumpSizeLaw::default(), 1.0, &mut rng(6)).is_err()
        );
    }

    #[test]
    fn poisson_counts_match_intensity() {
        for lambda in [0.118, 0.014] {
            let reps = 100_000;
            let mut r = rng(7);
            let total: usize = (0..reps)
                .map(|_| {
                    simulate_compound_poisson(lambda, &JumpSizeLaw::default(), 1.0, &mut r)
                        .unwrap()
                        .len()
                })
                .sum();
            let mean = total as f64 / reps as f64;
            let band = 3.0 * (lambda / reps as f64).sqrt();
            assert!((mean - lambda).abs() < band, "λ={lambda}: {mean}");
        }
    }

    #[test]
    fn jump_times_sorted_in_window() {
        let ev =
            simulate_compound_poisson(50.0, &JumpSizeLaw::default(), 2.0, &mut rng(8)).unwrap();
        assert!(!ev.is_empty());
        assert!(ev.windows(2).all(|w| w[0].time <= w[1].time));
        assert!(ev
            .iter()
            .all(|e| (0.0..2.0).contains(&e.time) && e.size != 0.0));
    }

    #[test]
    fn vg_degenerate_is_zero() {
        let vg = VgParams {
            kappa: 0.3,
            theta: 0.0,
            varsigma: 0.0,
        };
        let inc = simulate_vg_increments(&vg, 1e-3, 1000, &mut rng(9)).unwrap();
        assert!(inc.iter().all(|&x| x == 0.0));
        let bad = VgParams { kappa: 0.0, ..vg };
        assert!(simulate_vg_increments(&bad, 1e-3, 10, &mut rng(9)).is_err());
    }

    #[test]
    fn vg_moments() {
        let vg = VgParams {
            kappa: 0.2,
            theta: -0.3,
            varsigma: 0.25,
        };
        let dt = 1e-2;
        let n = 1_000_000;
        let inc = simulate_vg_increments(&vg, dt, n, &mut rng(10)).unwrap();
        let nf = n as f64;
        let mean = inc.iter().sum::<f64>() / nf;
        let var = inc.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
        let m = vg.increment_mean(dt);
        let v = vg.increment_variance(dt);
        assert!(
            (mean - m).abs() < 4.0 * (v / nf).sqrt(),
            "mean {mean} vs {m}"
        );
        // fourth moment of VG increments: var of the sample variance is
        // (m4 - v²)/n; bound the relative error loosely by the heavy kurtosis.
        let m4 = inc.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
        let band = 4.0 * ((m4 - var * var) / nf).sqrt();
        assert!((var - v).abs() < band, "var {var} vs {v} ± {band}");
    }

    #[test]
    fn jump_correlation_identities() {
        let a = [0.1, 0.0, -0.2];
        let b = [0.0, 0.3, 0.05];
        assert_eq!(correlate_jumps(&a, &b, 0.0).unwrap(), b.to_vec());
        assert_eq!(correlate_jumps(&a, &b, 1.0).unwrap(), a.to_vec());
        let mixed = correlate_jumps(&a, &b, 0.6).unwrap();
        for i in 0..3 {
            assert!((mixed[i] - (0.6 * a[i] + 0.8 * b[i])).abs() < 1e-15);
        }
        assert!(correlate_jumps(&a, &b[..2], 0.5).is_err());
    }
}
