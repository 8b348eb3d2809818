use rand::Rng;

use super::TailReport;
use crate::error::{LabError, Result};
use crate::replicas::map_replicas;

/// Coefficients of `X_{t+1} ≤ α_t X_t + β_t ŵ_t √X_t + γ_t`, `t = 1..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveProcessSpec {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl RecursiveProcessSpec {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || beta.len() != n || gamma.len() != n {
            return Err(LabError::Mismatch(format!(
                "coefficient lists of lengths {}, {}, {}",
                n,
                beta.len(),
                gamma.len()
            )));
        }
        if let Some(a) = alpha.iter().find(|&&a| !(0.0..1.0).contains(&a)) {
            return Err(LabError::invalid("alpha", format!("{a} is outside [0, 1)")));
        }
        if beta.iter().chain(&gamma).any(|&c| !(c >= 0.0 && c.is_finite())) {
            return Err(LabError::invalid("beta/gamma", "must be finite and non-negative"));
        }
        Ok(RecursiveProcessSpec { alpha, beta, gamma })
    }

    pub fn constant(horizon: usize, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![alpha; horizon], vec![beta; horizon], vec![gamma; horizon])
    }

    /// The process `Y_t = t‖x_{t+1} − x*‖²` of SGD with `η_t = 1/t` on a
    /// 1-strongly convex, 1-Lipschitz function: `α_t = (t−1)/t`,
    /// `β_t = 2/√t`, `γ_t = 4/(t+1)`, for which `K = 8`.
    pub fn sgd_toy(horizon: usize) -> Result<Self> {
        let coeffs = (1..=horizon).map(|t| {
            let t = t as f64;
            ((t - 1.0) / t, 2.0 / t.sqrt(), 4.0 / (t + 1.0))
        });
        let (mut a, mut b, mut g) = (Vec::new(), Vec::new(), Vec::new());
        for (x, y, z) in coeffs {
            a.push(x);
            b.push(y);
            g.push(z);
        }
        Self::new(a, b, g)
    }

    pub fn horizon(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
}

/// `K = max_t max(2γ_t/(1−α_t), 2β_t²/(1−α_t))`.
#[allow(non_snake_case)]
pub fn recursive_K(spec: &RecursiveProcessSpec) -> f64 {
    (0..spec.horizon())
        .map(|i| {
            let gap = 1.0 - spec.alpha[i];
            f64::max(2.0 * spec.gamma[i] / gap, 2.0 * spec.beta[i] * spec.beta[i] / gap)
        })
        .fold(0.0, f64::max)
}

/// `X_1..X_T` of the extremal process `X_1 = 0`,
/// `X_{t+1} = max(0, α_t X_t + β_t ŵ_t √X_t + γ_t)`, Rademacher `ŵ_t`.
pub fn simulate_recursive<R: Rng + ?Sized>(spec: &RecursiveProcessSpec, rng: &mut R) -> Vec<f64> {
    let n = spec.horizon();
    let mut xs = Vec::with_capacity(n);
    let mut x = 0.0f64;
    xs.push(x);
    for t in 0..n - 1 {
        let w = if rng.random::<bool>() { 1.0 } else { -1.0 };
        x = (spec.alpha[t] * x + spec.beta[t] * w * x.sqrt() + spec.gamma[t]).max(0.0);
        xs.push(x);
    }
    xs
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(LabError::invalid("delta", format!("{delta} is outside (0, 1)")))
    }
}

/// `(K ln(1/δ), eδ)`.
pub fn recursive_tail_bound(k: f64, delta: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    Ok((k * (1.0 / delta).ln(), std::f64::consts::E * delta))
}

/// `(K ln(1/δ) Σσ_t, eδ)` for the weighted sum `Σ σ_t X_t`.
pub fn recursive_weighted_tail_bound(k: f64, delta: f64, sigma: &[f64]) -> Result<(f64, f64)> {
    if sigma.iter().any(|&s| !(s >= 0.0)) {
        return Err(LabError::invalid("sigma", "weights must be non-negative"));
    }
    let (threshold, bound) = recursive_tail_bound(k, delta)?;
    Ok((threshold * sigma.iter().sum::<f64>(), bound))
}

/// Empirical `P(X_T ≥ K ln(1/δ))` for each `δ`.
pub fn recursive_tail_estimate(
    spec: &RecursiveProcessSpec,
    delta_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailReport>> {
    let finals = map_replicas(seed, trials, |_, rng| *simulate_recursive(spec, rng).last().expect("T ≥ 1"));
    tail_reports(&finals, recursive_K(spec), delta_grid, |t| t)
}

/// Empirical `P(Σ σ_t X_t ≥ K ln(1/δ) Σ σ_t)` for each `δ`.
pub fn recursive_weighted_tail_estimate(
    spec: &RecursiveProcessSpec,
    sigma: &[f64],
    delta_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailReport>> {
    if sigma.len() != spec.horizon() {
        return Err(LabError::Mismatch(format!("{} weights for T = {}", sigma.len(), spec.horizon())));
    }
    recursive_weighted_tail_bound(1.0, 0.5, sigma)?;
    let sums = map_replicas(seed, trials, |_, rng| {
        simulate_recursive(spec, rng).iter().zip(sigma).map(|(x, s)| x * s).sum::<f64>()
    });
    let total: f64 = sigma.iter().sum();
    tail_reports(&sums, recursive_K(spec), delta_grid, |t| t * total)
}

pub(super) fn tail_reports(
    samples: &[f64],
    k: f64,
    delta_grid: &[f64],
    scale: impl Fn(f64) -> f64,
) -> Result<Vec<TailReport>> {
    if samples.is_empty() {
        return Err(LabError::invalid("trials", "must be positive"));
    }
    delta_grid
        .iter()
        .map(|&delta| {
            let (threshold, bound) = recursive_tail_bound(k, delta)?;
            let threshold = scale(threshold);
            let hits = samples.iter().filter(|&&x| x >= threshold).count() as u64;
            Ok(TailReport::new(Some(delta), threshold, hits, samples.len() as u64, bound))
        })
        .collect()
}
