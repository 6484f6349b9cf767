use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use cojump::estimators::{self, hy_threshold_ic, threshold_iv, CovariationEstimates};
use cojump::experiments::{
    normalized_bias_stats, run_monte_carlo, sweep_thresholds, BiasSummary, SweepGrid,
};
use cojump::simulate::{build_paths, Model1Config, Model2Config, ModelConfig, RngSeed};
use cojump::{AsyncPanel, SampledPath, SyncPanel, ThresholdSpec};
use serde::Serialize;

use crate::failure::{CoreContext, Failure};
use crate::manifest::ManifestBuilder;
use crate::{EstimateArgs, McArgs, ModelArgs, SimulateArgs, SweepArgs, ThresholdArgs};

const FULL_SCALE_PATHS: usize = 3000;

fn spec_of(t: &ThresholdArgs) -> Result<ThresholdSpec, Failure> {
    ThresholdSpec::new(t.c, t.beta).ctx("threshold")
}

fn load_model(args: &ModelArgs) -> Result<ModelConfig, Failure> {
    let mut model = match (&args.config, args.model.as_deref()) {
        (Some(path), _) => {
            ModelConfig::from_file(path).ctx(format!("config {}", path.display()))?
        }
        (None, Some("model2")) => ModelConfig::Model2(Model2Config::placeholder()),
        (None, _) => ModelConfig::Model1(Model1Config::default()),
    };
    let overrides = [
        ("lambda1", args.lambda1),
        ("lambda3", args.lambda3),
        ("rho", args.rho),
        ("rho_j", args.rho_j),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            model.set_param(key, v).ctx("command-line override")?;
        }
    }
    for kv in &args.set {
        let (key, raw) = kv.split_once('=').ok_or_else(|| {
            Failure::Parse(anyhow::anyhow!("--set expects KEY=VALUE, got `{kv}`"))
        })?;
        let value: f64 = raw
            .trim()
            .parse()
            .map_err(|e| Failure::Parse(anyhow::anyhow!("--set {kv}: {e}")))?;
        model.set_param(key.trim(), value).ctx("--set")?;
    }
    model.validate().ctx("model config")?;
    Ok(model)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load_path(path: &PathBuf) -> Result<SampledPath, Failure> {
    SampledPath::from_csv_file(path).ctx(format!("reading {}", path.display()))
}

#[derive(Serialize)]
struct SyncReport<'a> {
    mode: &'static str,
    c: f64,
    beta: f64,
    #[serde(flatten)]
    estimates: &'a CovariationEstimates,
}

#[derive(Serialize)]
struct AsyncReport {
    mode: &'static str,
    c: f64,
    beta: f64,
    ic_hat: f64,
    iv1_hat: f64,
    iv2_hat: f64,
    h: f64,
    r_h: f64,
    horizon: f64,
}

pub fn estimate(args: EstimateArgs, strict: bool) -> Result<(), Failure> {
    let spec = spec_of(&args.threshold)?;
    let mut p1 = load_path(&args.file1)?;
    let mut p2 = load_path(&args.file2)?;
    let mut warnings = Vec::new();
    let json = if args.asynchronous {
        if let Some(t) = args.upto {
            p1 = p1.up_to(t).ctx("--upto")?;
            p2 = p2.up_to(t).ctx("--upto")?;
        }
        let panel = AsyncPanel::new(p1, p2).ctx("asynchronous panel")?;
        let h = panel.mesh();
        let r_h = spec.threshold(h).ctx("threshold")?;
        let report = AsyncReport {
            mode: "async",
            c: spec.c(),
            beta: spec.beta(),
            ic_hat: hy_threshold_ic(&panel, r_h).ctx("estimate")?,
            iv1_hat: threshold_iv(&panel.path1().increments(), r_h).ctx("estimate")?,
            iv2_hat: threshold_iv(&panel.path2().increments(), r_h).ctx("estimate")?,
            h,
            r_h,
            horizon: panel.path1().grid().horizon(),
        };
        serde_json::to_string_pretty(&report)?
    } else {
        let panel = SyncPanel::from_paths(&p1, &p2)
            .ctx("synchronous mode needs identical grids (use --async otherwise)")?;
        let est = estimators::estimate(&panel, &spec, args.upto).ctx("estimate")?;
        if est.avar_clamped || est.avar_hat <= 0.0 {
            warnings.push("variance estimate is 0; standard error undefined".to_string());
        }
        if est.rho_hat.is_none() {
            warnings.push("a threshold variance is 0; beta/rho undefined".to_string());
        }
        let report = SyncReport {
            mode: "sync",
            c: spec.c(),
            beta: spec.beta(),
            estimates: &est,
        };
        serde_json::to_string_pretty(&report)?
    };
    match &args.out {
        Some(dir) => {
            ensure_dir(dir)?;
            let mut manifest = ManifestBuilder::start("estimate").threshold(spec.c(), spec.beta());
            let path = dir.join("estimates.json");
            fs::write(&path, json + "\n")?;
            manifest.output(&path);
            manifest.finish(dir)?;
        }
        None => println!("{json}"),
    }
    report_warnings(&warnings, strict)
}

fn report_warnings(warnings: &[String], strict: bool) -> Result<(), Failure> {
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if strict && !warnings.is_empty() {
        return Err(Failure::Degenerate(warnings.join("; ")));
    }
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let seed = args.seed.seed;
    let bundle = build_paths(&model, RngSeed::new(seed, args.path_index)).ctx("simulation")?;
    ensure_dir(&args.out)?;
    let mut manifest = ManifestBuilder::start("simulate")
        .config(model.to_config_string())
        .seed(seed)
        .paths(1);

    let fine = args.out.join("bundle.csv");
    bundle.write_csv(create(&fine)?).ctx("writing bundle")?;
    manifest.output(&fine);

    let coarse = args.out.join("coarse.csv");
    bundle
        .write_coarse_csv(create(&coarse)?)
        .ctx("writing coarse panel")?;
    manifest.output(&coarse);

    #[derive(Serialize)]
    struct TruthsFile<'a> {
        path_index: u64,
        truths: &'a cojump::simulate::Truths,
        jumps: &'a Option<cojump::simulate::JumpRecord>,
    }
    let truths = args.out.join("truths.json");
    write_json(
        &truths,
        &TruthsFile {
            path_index: args.path_index,
            truths: &bundle.truths,
            jumps: &bundle.jumps,
        },
    )?;
    manifest.output(&truths);
    manifest.finish(&args.out)
}

fn summary_warnings(summary: &BiasSummary) -> Vec<String> {
    let mut w = Vec::new();
    if summary.failures > 0 {
        w.push(format!("{} paths failed", summary.failures));
    }
    if summary.undefined_normalized > 0 {
        w.push(format!(
            "normalized bias undefined on {} paths",
            summary.undefined_normalized
        ));
    }
    if summary.avar_clamped > 0 {
        w.push(format!(
            "variance estimate clamped on {} paths",
            summary.avar_clamped
        ));
    }
    w
}

pub fn mc(args: McArgs, strict: bool) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let spec = spec_of(&args.threshold)?;
    let n_paths = if args.full_scale {
        FULL_SCALE_PATHS
    } else {
        args.paths
    };
    if n_paths == 0 {
        return Err(Failure::invalid("--paths must be at least 1"));
    }
    let seed = args.seed.seed;
    let mut manifest = ManifestBuilder::start("mc")
        .config(model.to_config_string())
        .threshold(spec.c(), spec.beta())
        .seed(seed)
        .paths(n_paths);
    let summary = run_monte_carlo(&model, &spec, n_paths, seed).ctx("monte carlo")?;
    ensure_dir(&args.out)?;

    let path = args.out.join("summary.json");
    write_json(&path, &summary)?;
    manifest.output(&path);

    let path = args.out.join("paths.csv");
    summary
        .write_records_csv(create(&path)?)
        .ctx("writing per-path records")?;
    manifest.output(&path);

    let mut warnings = summary_warnings(&summary);
    match normalized_bias_stats(&summary, args.qq_points) {
        Ok(stats) => {
            if stats.degenerate {
                warnings.push("normalized bias has zero spread".into());
            }
            let path = args.out.join("normalized_bias.json");
            write_json(&path, &stats)?;
            manifest.output(&path);
            let path = args.out.join("normalized_qq.csv");
            let mut out = String::from("p,empirical,normal\n");
            for q in &stats.qq {
                out.push_str(&format!("{},{:e},{:e}\n", q.p, q.empirical, q.normal));
            }
            fs::write(&path, out)?;
            manifest.output(&path);
        }
        Err(e) => warnings.push(format!("normalized bias statistics unavailable: {e}")),
    }
    manifest.finish(&args.out)?;
    report_warnings(&warnings, strict)
}

pub fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let default = SweepGrid::default();
    let grid = SweepGrid::new(
        args.cs.unwrap_or(default.cs),
        args.betas.unwrap_or(default.betas),
    )
    .ctx("sweep grid")?;
    if args.paths == 0 {
        return Err(Failure::invalid("--paths must be at least 1"));
    }
    let seed = args.seed.seed;
    let mut manifest = ManifestBuilder::start("sweep")
        .config(model.to_config_string())
        .seed(seed)
        .paths(args.paths);
    let result = sweep_thresholds(&model, &grid, args.paths, seed).ctx("sweep")?;
    ensure_dir(&args.out)?;
    let path = args.out.join("sweep.json");
    write_json(&path, &result)?;
    manifest.output(&path);
    let path = args.out.join("sweep_matrix.csv");
    result
        .write_matrix_csv(create(&path)?)
        .ctx("writing sweep matrix")?;
    manifest.output(&path);
    manifest.finish(&args.out)
}
