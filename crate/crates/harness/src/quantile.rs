//! Nearest-rank empirical quantiles.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantileError {
    #[error("no samples")]
    Empty,
    #[error("quantile level {0} is outside (0, 1]")]
    Level(f64),
    #[error("non-finite sample")]
    NonFinite,
}

/// Quantiles of one sample at several levels, optionally tagged with `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileSummary {
    #[serde(rename = "T")]
    pub horizon: Option<usize>,
    pub levels: Vec<f64>,
    pub values: Vec<f64>,
}

impl QuantileSummary {
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = Some(horizon);
        self
    }

    /// `value · T`, or `None` without a horizon.
    pub fn times_t(&self) -> Option<Vec<f64>> {
        let t = self.horizon? as f64;
        Some(self.values.iter().map(|v| v * t).collect())
    }

    /// `value · T / ln T`, or `None` without a horizon.
    pub fn times_t_over_log_t(&self) -> Option<Vec<f64>> {
        let t = self.horizon? as f64;
        Some(self.values.iter().map(|v| v * t / t.ln()).collect())
    }
}

/// Sorted copy of `samples`.
fn sorted(samples: &[f64]) -> Result<Vec<f64>, QuantileError> {
    if samples.is_empty() {
        return Err(QuantileError::Empty);
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(QuantileError::NonFinite);
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn rank(level: f64, n: usize) -> Result<usize, QuantileError> {
    if !(level > 0.0 && level <= 1.0) {
        return Err(QuantileError::Level(level));
    }
    // Guard against `level · n` landing one ulp above an integer.
    let r = (level * n as f64 - 1e-9).ceil() as usize;
    Ok(r.clamp(1, n) - 1)
}

/// Smallest sample `x` with at least `⌈level · n⌉` samples `≤ x`.
pub fn quantile(samples: &[f64], level: f64) -> Result<f64, QuantileError> {
    let s = sorted(samples)?;
    Ok(s[rank(level, s.len())?])
}

pub fn quantile_summary(samples: &[f64], levels: &[f64]) -> Result<QuantileSummary, QuantileError> {
    let s = sorted(samples)?;
    let values = levels
        .iter()
        .map(|&l| rank(l, s.len()).map(|i| s[i]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuantileSummary {
        horizon: None,
        levels: levels.to_vec(),
        values,
    })
}
