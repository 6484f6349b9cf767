//! Model configurations and their key=value file format.
//!
//! ```text
//! model = model1
//!
//! [sampling]
//! days = 1
//! day_seconds = 25200
//! fine_step_seconds = 1
//! coarse_step_seconds = 300
//!
//! [diffusion]
//! drift = 0
//! rho = 0.5
//! ...
//!
//! [jumps]
//! lambda1 = 0.118
//! ...
//! ```
//!
//! Keys are unique across sections, so a section header only groups keys for
//! readability. Defaults are illustrative, not calibrated estimates.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Fine Euler grid and coarse sampling grid, both in seconds of a trading
/// day. Time is measured in days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub days: u32,
    pub day_seconds: u32,
    pub fine_step_seconds: u32,
    pub coarse_step_seconds: u32,
}

impl Default for Sampling {
    /// A 7-hour day at 1-second resolution, sampled every 5 minutes
    /// (84 returns per day).
    fn default() -> Self {
        Self {
            days: 1,
            day_seconds: 25_200,
            fine_step_seconds: 1,
            coarse_step_seconds: 300,
        }
    }
}

impl Sampling {
    pub fn validate(&self) -> Result<()> {
        if self.days == 0 {
            return Err(Error::config("days", "must be at least 1"));
        }
        if self.day_seconds == 0 {
            return Err(Error::config("day_seconds", "must be positive"));
        }
        if self.fine_step_seconds == 0 {
            return Err(Error::config("fine_step_seconds", "must be positive"));
        }
        if !self.coarse_step_seconds.is_multiple_of(self.fine_step_seconds) {
            return Err(Error::config(
                "coarse_step_seconds",
                format!(
                    "must be a multiple of fine_step_seconds = {}",
                    self.fine_step_seconds
                ),
            ));
        }
        if !self.day_seconds.is_multiple_of(self.coarse_step_seconds) {
            return Err(Error::config(
                "coarse_step_seconds",
                format!("must divide day_seconds = {}", self.day_seconds),
            ));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        f64::from(self.days)
    }

    pub fn fine_steps(&self) -> usize {
        (self.days as usize * self.day_seconds as usize) / self.fine_step_seconds as usize
    }

    /// Fine step in days.
    pub fn fine_dt(&self) -> f64 {
        f64::from(self.fine_step_seconds) / f64::from(self.day_seconds)
    }

    pub fn fine_grid(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(self.fine_steps(), self.horizon())
    }

    /// Grid with `step_seconds` spacing; `step_seconds` must be a multiple
    /// of the fine step and divide the day.
    pub fn grid_for_step(&self, step_seconds: u32) -> Result<TimeGrid> {
        self.check_step(step_seconds)?;
        let n = self.days as usize * (self.day_seconds / step_seconds) as usize;
        TimeGrid::uniform(n, self.horizon())
    }

    pub fn coarse_grid(&self) -> Result<TimeGrid> {
        self.grid_for_step(self.coarse_step_seconds)
    }

    /// Number of fine steps inside one interval of `step_seconds`.
    pub fn fine_per_step(&self, step_seconds: u32) -> Result<usize> {
        self.check_step(step_seconds)?;
        Ok((step_seconds / self.fine_step_seconds) as usize)
    }

    fn check_step(&self, step_seconds: u32) -> Result<()> {
        if step_seconds == 0
            || !step_seconds.is_multiple_of(self.fine_step_seconds)
            || !self.day_seconds.is_multiple_of(step_seconds)
        {
            return Err(Error::InvalidArgument(format!(
                "sampling step {step_seconds}s must be a multiple of the fine step \
                 ({}s) and divide the day ({}s)",
                self.fine_step_seconds, self.day_seconds
            )));
        }
        Ok(())
    }
}

/// One-factor exponential Ornstein-Uhlenbeck volatility:
/// `σ_t = exp(ℓ_t)`, `dℓ = -α (ℓ - ln σ̄) dt + η dB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvParams {
    /// α, per day.
    pub mean_reversion: f64,
    /// η, per sqrt(day).
    pub vol_of_vol: f64,
    /// σ̄: median daily volatility.
    pub sigma_level: f64,
}

impl Default for SvParams {
    /// Stationary 95% band of σ is [0.013, 0.019]; half-life of about 50
    /// minutes so a single day roams most of the band.
    fn default() -> Self {
        Self {
            mean_reversion: 20.0,
            vol_of_vol: 0.612,
            sigma_level: 0.015716,
        }
    }
}

impl SvParams {
    pub fn validate(&self, suffix: &str) -> Result<()> {
        if !(self.sigma_level > 0.0 && self.sigma_level.is_finite()) {
            return Err(Error::config(
                format!("sigma_level{suffix}"),
                "must be positive",
            ));
        }
        if !(self.mean_reversion >= 0.0 && self.mean_reversion.is_finite()) {
            return Err(Error::config(
                format!("mean_reversion{suffix}"),
                "must be >= 0",
            ));
        }
        if !(self.vol_of_vol >= 0.0 && self.vol_of_vol.is_finite()) {
            return Err(Error::config(format!("vol_of_vol{suffix}"), "must be >= 0"));
        }
        Ok(())
    }

    /// Stationary law `N(ln σ̄, η² / 2α)` of the log-volatility, if any.
    pub fn stationary_log_sd(&self) -> Option<f64> {
        (self.mean_reversion > 0.0).then(|| self.vol_of_vol / (2.0 * self.mean_reversion).sqrt())
    }
}

/// Gaussian jump sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpSizeLaw {
    pub mean: f64,
    pub std: f64,
}

impl Default for JumpSizeLaw {
    fn default() -> Self {
        Self {
            mean: 0.15,
            std: 0.03,
        }
    }
}

impl JumpSizeLaw {
    pub fn validate(&self) -> Result<()> {
        if !(self.std >= 0.0 && self.std.is_finite()) {
            return Err(Error::config("jump_std", "must be >= 0"));
        }
        if !self.mean.is_finite() {
            return Err(Error::config("jump_mean", "must be finite"));
        }
        if self.std == 0.0 && self.mean == 0.0 {
            return Err(Error::config(
                "jump_std",
                "jump sizes would be identically 0; the size law must not charge {0}",
            ));
        }
        Ok(())
    }
}

/// Stochastic volatility diffusions plus correlated compound Poisson jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model1Config {
    pub sampling: Sampling,
    /// Drift `a`, per day, shared by both processes.
    pub drift: f64,
    pub rho: f64,
    pub sv1: SvParams,
    pub sv2: SvParams,
    /// Intensity of `J¹`, per day.
    pub lambda1: f64,
    /// Intensity of the independent `J³`, per day.
    pub lambda3: f64,
    pub jump_size: JumpSizeLaw,
    /// `J² = ρ_J J¹ + sqrt(1 - ρ_J²) J³`.
    pub rho_j: f64,
}

impl Default for Model1Config {
    fn default() -> Self {
        Self {
            sampling: Sampling::default(),
            drift: 0.0,
            rho: 0.5,
            sv1: SvParams::default(),
            sv2: SvParams::default(),
            lambda1: 0.118,
            lambda3: 0.118,
            jump_size: JumpSizeLaw::default(),
            rho_j: 0.5,
        }
    }
}

impl Model1Config {
    pub fn with_intensity(mut self, lambda: f64) -> Self {
        self.lambda1 = lambda;
        self.lambda3 = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        check_finite("drift", self.drift)?;
        check_corr("rho", self.rho)?;
        check_corr("rho_j", self.rho_j)?;
        self.sv1.validate("1")?;
        self.sv2.validate("2")?;
        check_intensity("lambda1", self.lambda1)?;
        check_intensity("lambda3", self.lambda3)?;
        self.jump_size.validate()
    }
}

/// Variance Gamma: `θ G_t + ς B_{G_t}` with `G` a gamma subordinator of
/// unit mean rate and variance rate `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VgParams {
    pub kappa: f64,
    pub theta: f64,
    pub varsigma: f64,
}

impl VgParams {
    pub fn validate(&self, suffix: &str) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::config(format!("kappa{suffix}"), "must be positive"));
        }
        check_finite(&format!("theta{suffix}"), self.theta)?;
        if !(self.varsigma >= 0.0 && self.varsigma.is_finite()) {
            return Err(Error::config(format!("varsigma{suffix}"), "must be >= 0"));
        }
        Ok(())
    }

    /// Mean of one increment over `dt`.
    pub fn increment_mean(&self, dt: f64) -> f64 {
        self.theta * dt
    }

    /// Variance of one increment over `dt`.
    pub fn increment_variance(&self, dt: f64) -> f64 {
        (self.varsigma * self.varsigma + self.theta * self.theta * self.kappa) * dt
    }
}

/// Constant volatility diffusions plus correlated Variance Gamma jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model2Config {
    pub sampling: Sampling,
    pub drift: f64,
    pub rho: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub vg1: VgParams,
    pub vg3: VgParams,
    pub rho_j: f64,
}

impl Model2Config {
    /// Placeholder parameter set used by the test-suite and examples. These
    /// are not estimates for any particular stock; supply real values through
    /// a config file.
    ///
    /// The jump part is deliberately large (few, big VG jumps per day) so
    /// that with 5-minute returns and `r_h = 0.1 h^0.99` most of the jump
    /// variation lands in intervals that exceed the threshold.
    pub fn placeholder() -> Self {
        let vg = VgParams {
            kappa: 0.1,
            theta: 0.0,
            varsigma: 1.5,
        };
        Self {
            sampling: Sampling::default(),
            drift: 0.0,
            rho: 0.5,
            sigma1: 0.04,
            sigma2: 0.04,
            vg1: vg,
            vg3: vg,
            rho_j: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        check_finite("drift", self.drift)?;
        check_corr("rho", self.rho)?;
        check_corr("rho_j", self.rho_j)?;
        for (name, s) in [("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::config(name, "must be >= 0"));
            }
        }
        self.vg1.validate("1")?;
        self.vg3.validate("3")
    }
}

fn check_finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, "must be finite"))
    }
}

fn check_corr(field: &str, x: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("must lie in [-1, 1], got {x}"),
        ))
    }
}

fn check_intensity(field: &str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be >= 0, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelConfig {
    Model1(Model1Config),
    Model2(Model2Config),
}

const SAMPLING_KEYS: [&str; 4] = [
    "days",
    "day_seconds",
    "fine_step_seconds",
    "coarse_step_seconds",
];

impl ModelConfig {
    pub fn sampling(&self) -> &Sampling {
        match self {
            Self::Model1(c) => &c.sampling,
            Self::Model2(c) => &c.sampling,
        }
    }

    pub fn sampling_mut(&mut self) -> &mut Sampling {
        match self {
            Self::Model1(c) => &mut c.sampling,
            Self::Model2(c) => &mut c.sampling,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Model1(_) => "model1",
            Self::Model2(_) => "model2",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Model1(c) => c.validate(),
            Self::Model2(c) => c.validate(),
        }
    }

    /// True when the model can produce jumps at all.
    pub fn has_jumps(&self) -> bool {
        match self {
            Self::Model1(c) => c.lambda1 > 0.0 || c.lambda3 > 0.0,
            Self::Model2(c) => c.vg1.varsigma > 0.0 || c.vg1.theta != 0.0,
        }
    }

    /// Sets one parameter by its config-file key.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<()> {
        if SAMPLING_KEYS.contains(&key) {
            if !(value >= 0.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                return Err(Error::config(
                    key,
                    format!("must be a non-negative integer, got {value}"),
                ));
            }
            let v = value as u32;
            let s = self.sampling_mut();
            match key {
                "days" => s.days = v,
                "day_seconds" => s.day_seconds = v,
                "fine_step_seconds" => s.fine_step_seconds = v,
                _ => s.coarse_step_seconds = v,
            }
            return Ok(());
        }
        let slot: Option<&mut f64> = match self {
            Self::Model1(c) => match key {
                "drift" => Some(&mut c.drift),
                "rho" => Some(&mut c.rho),
                "mean_reversion1" => Some(&mut c.sv1.mean_reversion),
                "vol_of_vol1" => Some(&mut c.sv1.vol_of_vol),
                "sigma_level1" => Some(&mut c.sv1.sigma_level),
                "mean_reversion2" => Some(&mut c.sv2.mean_reversion),
                "vol_of_vol2" => Some(&mut c.sv2.vol_of_vol),
                "sigma_level2" => Some(&mut c.sv2.sigma_level),
                "lambda1" => Some(&mut c.lambda1),
                "lambda3" => Some(&mut c.lambda3),
                "jump_mean" => Some(&mut c.jump_size.mean),
                "jump_std" => Some(&mut c.jump_size.std),
                "rho_j" => Some(&mut c.rho_j),
                _ => None,
            },
            Self::Model2(c) => match key {
                "drift" => Some(&mut c.drift),
                "rho" => Some(&mut c.rho),
                "sigma1" => Some(&mut c.sigma1),
                "sigma2" => Some(&mut c.sigma2),
                "kappa1" => Some(&mut c.vg1.kappa),
                "theta1" => Some(&mut c.vg1.theta),
                "varsigma1" => Some(&mut c.vg1.varsigma),
                "kappa3" => Some(&mut c.vg3.kappa),
                "theta3" => Some(&mut c.vg3.theta),
                "varsigma3" => Some(&mut c.vg3.varsigma),
                "rho_j" => Some(&mut c.rho_j),
                _ => None,
            },
        };
        match slot {
            Some(s) => {
                *s = value;
                Ok(())
            }
            None => Err(Error::config(
                key,
                format!("unknown parameter for {}", self.name()),
            )),
        }
    }

    /// Parses the key=value format. Unknown keys are errors; for Model 1
    /// missing keys keep their defaults, for Model 2 the Variance Gamma
    /// parameters are mandatory.
    pub fn parse(text: &str) -> Result<Self> {
        let ini = ini::Ini::load_from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let model = ini
            .general_section()
            .get("model")
            .ok_or_else(|| Error::config("model", "missing (expected model1 or model2)"))?;
        let mut config = match model.trim() {
            "model1" | "1" => ModelConfig::Model1(Model1Config::default()),
            "model2" | "2" => ModelConfig::Model2(Model2Config::placeholder()),
            other => {
                return Err(Error::config("model", format!("unknown model `{other}`")));
            }
        };
        let mut seen = Vec::new();
        for (_, props) in ini.iter() {
            for (key, raw) in props.iter() {
                if key == "model" {
                    continue;
                }
                let value: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("`{key} = {raw}`: {e}")))?;
                config.set_param(key, value)?;
                seen.push(key.to_string());
            }
        }
        if let ModelConfig::Model2(_) = config {
            for key in [
                "kappa1",
                "theta1",
                "varsigma1",
                "kappa3",
                "theta3",
                "varsigma3",
            ] {
                if !seen.iter().any(|k| k == key) {
                    return Err(Error::config(key, "required for model2"));
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the config in the file format; `parse` round-trips it.
    pub fn to_config_string(&self) -> String {
        let s = self.sampling();
        let mut out = String::new();
        let _ = writeln!(out, "model = {}", self.name());
        let _ = writeln!(out, "\n[sampling]");
        let _ = writeln!(out, "days = {}", s.days);
        let _ = writeln!(out, "day_seconds = {}", s.day_seconds);
        let _ = writeln!(out, "fine_step_seconds = {}", s.fine_step_seconds);
        let _ = writeln!(out, "coarse_step_seconds = {}", s.coarse_step_seconds);
        match self {
            Self::Model1(c) => {
                let _ = writeln!(out, "\n[diffusion]");
                let _ = writeln!(out, "drift = {:?}", c.drift);
                let _ = writeln!(out, "rho = {:?}", c.rho);
                for (i, sv) in [(1, &c.sv1), (2, &c.sv2)] {
                    let _ = writeln!(out, "mean_reversion{i} = {:?}", sv.mean_reversion);
                    let _ = writeln!(out, "vol_of_vol{i} = {:?}", sv.vol_of_vol);
                    let _ = writeln!(out, "sigma_level{i} = {:?}", sv.sigma_level);
                }
                let _ = writeln!(out, "\n[jumps]");
                let _ = writeln!(out, "lambda1 = {:?}", c.lambda1);
                let _ = writeln!(out, "lambda3 = {:?}", c.lambda3);
                let _ = writeln!(out, "jump_mean = {:?}", c.jump_size.mean);
                let _ = writeln!(out, "jump_std = {:?}", c.jump_size.std);
                let _ = writeln!(out, "rho_j = {:?}", c.rho_j);
            }
            Self::Model2(c) => {
                let _ = writeln!(out, "\n[diffusion]");
                let _ = writeln!(out, "drift = {:?}", c.drift);
                let _ = writeln!(out, "rho = {:?}", c.rho);
                let _ = writeln!(out, "sigma1 = {:?}", c.sigma1);
                let _ = writeln!(out, "sigma2 = {:?}", c.sigma2);
                let _ = writeln!(out, "\n[jumps]");
                for (i, vg) in [(1, &c.vg1), (3, &c.vg3)] {
                    let _ = writeln!(out, "kappa{i} = {:?}", vg.kappa);
                    let _ = writeln!(out, "theta{i} = {:?}", vg.theta);
                    let _ = writeln!(out, "varsigma{i} = {:?}", vg.varsigma);
                }
                let _ = writeln!(out, "rho_j = {:?}", c.rho_j);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sampling_is_84_five_minute_returns() {
        let s = Sampling::default();
        s.validate().unwrap();
        assert_eq!(s.fine_steps(), 25_200);
        assert_eq!(s.coarse_grid().unwrap().intervals(), 84);
        assert!((s.coarse_grid().unwrap().mesh() - 1.0 / 84.0).abs() < 1e-15);
        assert_eq!(s.fine_per_step(300).unwrap(), 300);
        assert!(s.grid_for_step(11).is_err());
    }

    #[test]
    fn default_sv_band() {
        let sv = SvParams::default();
        let sd = sv.stationary_log_sd().unwrap();
        let lo = (sv.sigma_level.ln() - 1.96 * sd).exp();
        let hi = (sv.sigma_level.ln() + 1.96 * sd).exp();
        assert!((lo - 0.013).abs() < 1e-4, "{lo}");
        assert!((hi - 0.019).abs() < 1e-4, "{hi}");
    }

    #[test]
    fn roundtrip_both_models() {
        for cfg in [
            ModelConfig::Model1(Model1Config::default().with_intensity(0.014)),
            ModelConfig::Model2(Model2Config::placeholder()),
        ] {
            let text = cfg.to_config_string();
            assert_eq!(ModelConfig::parse(&text).unwrap(), cfg);
        }
    }

    #[test]
    fn invalid_fields_are_named() {
        let text = "model = model1\n[jumps]\nlambda1 = -1\n";
        match ModelConfig::parse(text) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "lambda1"),
            other => panic!("{other:?}"),
        }
        let text = "model = model1\n[jumps]\nlambda9 = 1\n";
        match ModelConfig::parse(text) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "lambda9"),
            other => panic!("{other:?}"),
        }
        let text = "model = model1\n[diffusion]\nrho = 1.5\n";
        assert!(matches!(
            ModelConfig::parse(text),
            Err(Error::InvalidConfig { .. })
        ));
        let text = "model = model1\n[diffusion]\nrho = abc\n";
        assert!(ModelConfig::parse(text).unwrap_err().is_parse_error());
    }

    #[test]
    fn model2_requires_vg_parameters() {
        let text = "model = model2\n[jumps]\nkappa1 = 0.5\n";
        assert!(matches!(
            ModelConfig::parse(text),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn sampling_must_nest() {
        let mut s = Sampling::default();
        s.coarse_step_seconds = 11;
        assert!(s.validate().is_err());
        s.coarse_step_seconds = 300;
        s.fine_step_seconds = 7;
        assert!(s.validate().is_err());
    }

    #[test]
    fn jump_law_without_mass_at_zero() {
        assert!(JumpSizeLaw {
            mean: 0.0,
            std: 0.0
        }
        .validate()
        .is_err());
        assert!(JumpSizeLaw {
            mean: 0.1,
            std: 0.0
        }
        .validate()
        .is_ok());
        assert!(JumpSizeLaw {
            mean: 0.0,
            std: 0.1
        }
        .validate()
        .is_ok());
    }
}
