use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::failure::Failure;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to rerun a command. Written once per output directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub code_version: String,
    /// Model config in the config-file format, if the command simulates.
    pub config: Option<String>,
    pub threshold: Option<ThresholdSnapshot>,
    pub master_seed: Option<u64>,
    pub n_paths: Option<usize>,
    pub threads: Option<usize>,
    pub outputs: Vec<PathBuf>,
    pub started_unix_secs: u64,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Serialize)]
pub struct ThresholdSnapshot {
    pub c: f64,
    pub beta: f64,
}

pub struct ManifestBuilder {
    manifest: RunManifest,
    start: Instant,
}

impl ManifestBuilder {
    pub fn start(command: &str) -> Self {
        let started = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            manifest: RunManifest {
                command: command.to_string(),
                argv: std::env::args().collect(),
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                config: None,
                threshold: None,
                master_seed: None,
                n_paths: None,
                threads: Some(rayon::current_num_threads()),
                outputs: Vec::new(),
                started_unix_secs: started,
                wall_clock_secs: 0.0,
            },
            start: Instant::now(),
        }
    }

    pub fn config(mut self, text: String) -> Self {
        self.manifest.config = Some(text);
        self
    }

    pub fn threshold(mut self, c: f64, beta: f64) -> Self {
        self.manifest.threshold = Some(ThresholdSnapshot { c, beta });
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.manifest.master_seed = Some(seed);
        self
    }

    pub fn paths(mut self, n: usize) -> Self {
        self.manifest.n_paths = Some(n);
        self
    }

    pub fn output(&mut self, path: &Path) {
        self.manifest.outputs.push(path.to_path_buf());
    }

    pub fn finish(mut self, dir: &Path) -> Result<(), Failure> {
        self.manifest.wall_clock_secs = self.start.elapsed().as_secs_f64();
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(&self.manifest)? + "\n")?;
        Ok(())
    }
}
