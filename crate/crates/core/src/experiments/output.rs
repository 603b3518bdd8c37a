use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::runs::TrialSummary;
use crate::error::Result;

pub const PRNG_SCHEME: &str =
    "splitmix64 counter mode: arrow i at stack key v = mix64(mix64(seed ^ mix64(v ^ salt)) + (i+1)*gamma), multiply-high range reduction";

/// Run metadata that legitimately differs between identical runs; kept in
/// its own object so the rest of the manifest is reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub timestamp_unix: u64,
    pub hostname: String,
    pub wall_clock_seconds: f64,
    pub threads: usize,
}

impl RunInfo {
    pub fn collect(wall_clock_seconds: f64, threads: usize) -> RunInfo {
        let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let hostname = std::env::var("HOSTNAME")
            .ok()
            .or_else(|| fs::read_to_string("/etc/hostname").ok())
            .map(|s| s.trim().to_string())
            .unwrap_or_default();
        RunInfo { timestamp_unix, hostname, wall_clock_seconds, threads }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub code_version: String,
    pub seed: u64,
    /// Fully resolved configuration, defaults included.
    pub config: Value,
    pub prng: String,
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
    pub run: RunInfo,
}

impl Manifest {
    pub fn new(experiment: &str, seed: u64, config: Value, run: RunInfo) -> Manifest {
        Manifest {
            experiment: experiment.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            config,
            prng: PRNG_SCHEME.into(),
            notes: Vec::new(),
            outputs: Vec::new(),
            run,
        }
    }
}

/// Write `<experiment>.csv` and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, summary: &TrialSummary, manifest: &mut Manifest) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_name = format!("{}.csv", summary.experiment);
    let csv = dir.join(&csv_name);
    fs::write(&csv, summary.to_csv())?;
    manifest.outputs = vec![csv_name];
    let json = dir.join("manifest.json");
    fs::write(&json, serde_json::to_string_pretty(manifest)? + "\n")?;
    Ok(vec![csv, json])
}
