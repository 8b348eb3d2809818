//! The single writer: every file of a run is produced here, after all
//! replicas have been aggregated.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::experiments::Outcome;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn summary_json(cfg: &ExperimentConfig, outcome: &Outcome, wall_time: Duration) -> Value {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "tool": "lab",
        "version": TOOL_VERSION,
        "experiment": outcome.experiment,
        "config": cfg,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "wall_time_s": wall_time.as_secs_f64(),
        "timestamp": timestamp,
        "results": outcome.results,
        "checks": outcome.checks,
        "pass": outcome.passed(),
    })
}

/// Write `summary.json` and every file of `outcome` under `dir`. Returns the
/// paths written, summary first.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome, wall_time: Duration) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(outcome.files.len() + 1);
    let summary = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary_json(cfg, outcome, wall_time)).map_err(io::Error::other)?;
    fs::write(&summary, text + "\n")?;
    written.push(summary);
    for file in &outcome.files {
        let path = dir.join(&file.path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, &file.contents)?;
        written.push(path);
    }
    Ok(written)
}
