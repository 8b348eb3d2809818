//! Experiment runner for sgdlab: config parsing, dispatch to the library's
//! estimators and certificates, quantile summaries, and file output.

pub mod config;
pub mod experiments;
pub mod output;
pub mod quantile;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{parse_config, ConfigError, Experiment, ExperimentConfig, NoiseSpec, OUT_DIR_ENV};
pub use experiments::{run_experiment, Check, Outcome, OutputFile, RunError};
pub use output::{summary_json, write_outputs, TOOL_VERSION};
pub use quantile::{quantile, quantile_summary, QuantileError, QuantileSummary};

/// Output directory: the command line wins over the config, which wins over
/// the environment; `out` otherwise.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ExperimentConfig, env: Option<&str>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Run `cfg` and write its outputs to `dir`.
pub fn run_and_write(cfg: &ExperimentConfig, dir: &Path) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let outcome = run_experiment(cfg)?;
    write_outputs(dir, cfg, &outcome, start.elapsed())?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_dir_precedence() {
        let mut cfg = parse_config("experiment = sc-lower\nT = 4").unwrap();
        assert_eq!(resolve_out_dir(None, &cfg, None), PathBuf::from("out"));
        assert_eq!(resolve_out_dir(None, &cfg, Some("env")), PathBuf::from("env"));
        cfg.out_dir = Some("cfg".into());
        assert_eq!(resolve_out_dir(None, &cfg, Some("env")), PathBuf::from("cfg"));
        assert_eq!(resolve_out_dir(Some(Path::new("flag")), &cfg, Some("env")), PathBuf::from("flag"));
    }
}
