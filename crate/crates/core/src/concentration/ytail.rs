use super::recursive::tail_reports;
use super::TailReport;
use crate::error::{LabError, Result};
use crate::replicas::map_replicas;
use crate::schedule::StepSchedule;
use crate::sgd::drive;
use crate::stochastic::QuadraticOracle;

/// The constant for `Y_t` under `η_t = 1/t`.
const TOY_K: f64 = 8.0;

/// `Y_1..Y_{T−1}` with `Y_t = t‖x_{t+1}‖²`, for each replica of SGD on the
/// quadratic from the origin with `η_t = 1/t`.
pub fn ytail_values(oracle: &QuadraticOracle, horizon: usize, trials: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if horizon < 2 {
        return Err(LabError::invalid("T", "need T ≥ 2"));
    }
    let domain = oracle.instance().domain().clone();
    let x1 = crate::vector::Vector::zeros(oracle.instance().dim());
    let runs = map_replicas(seed, trials, |_, rng| {
        let mut ys = Vec::with_capacity(horizon - 1);
        drive(oracle, &domain, &x1, &StepSchedule::InverseT, horizon - 1, rng, |s| {
            ys.push(s.t as f64 * s.next.norm_sq());
        })
        .map(|_| ys)
    });
    runs.into_iter().collect()
}

/// Empirical `P(Y_t ≥ 8 ln(1/δ))` against `eδ`, `1 ≤ t ≤ T−1`.
pub fn ytail_check(
    oracle: &QuadraticOracle,
    horizon: usize,
    t: usize,
    delta_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailReport>> {
    LabError::check_range("t", t, 1, horizon.saturating_sub(1))?;
    let ys: Vec<f64> = ytail_values(oracle, t + 1, trials, seed)?
        .into_iter()
        .map(|y| y[t - 1])
        .collect();
    tail_reports(&ys, TOY_K, delta_grid, |th| th)
}

/// Empirical `P(Σ σ_t Y_t ≥ 8 ln(1/δ) Σ σ_t)` against `eδ`; `sigma` has `T−1` entries.
pub fn ytail_weighted_check(
    oracle: &QuadraticOracle,
    horizon: usize,
    sigma: &[f64],
    delta_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailReport>> {
    if sigma.len() + 1 != horizon {
        return Err(LabError::Mismatch(format!("{} weights for T = {horizon}", sigma.len())));
    }
    if sigma.iter().any(|&s| !(s >= 0.0)) {
        return Err(LabError::invalid("sigma", "weights must be non-negative"));
    }
    let total: f64 = sigma.iter().sum();
    let sums: Vec<f64> = ytail_values(oracle, horizon, trials, seed)?
        .into_iter()
        .map(|y| y.iter().zip(sigma).map(|(a, b)| a * b).sum())
        .collect();
    tail_reports(&sums, TOY_K, delta_grid, |th| th * total)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{NoiseModel, QuadraticInstance};

    #[test]
    fn noiseless_is_zero() {
        let oracle = QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::None).unwrap();
        let reports = ytail_check(&oracle, 64, 63, &[0.1, 0.01], 50, 1).unwrap();
        assert!(reports.iter().all(|r| r.hits == 0));
    }

    #[test]
    fn one_dimensional_closed_form() {
        let oracle = QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::Rademacher1d).unwrap();
        let ys = ytail_values(&oracle, 32, 20, 9).unwrap();
        for y in &ys {
            // Y_t = t · (mean of t signs)², a perfect square of an integer over t.
            for (i, &v) in y.iter().enumerate() {
                let t = (i + 1) as f64;
                let s = (v * t).sqrt();
                assert!((s - s.round()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tail_within_bound() {
        let oracle = QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::Rademacher1d).unwrap();
        for r in ytail_check(&oracle, 128, 127, &[0.2, 0.05], 4_000, 2).unwrap() {
            assert!(r.within_bound(0.005), "{r:?}");
        }
        for r in ytail_weighted_check(&oracle, 64, &[1.0; 63], &[0.1], 1_000, 2).unwrap() {
            assert!(r.within_bound(0.005), "{r:?}");
        }
        assert!(ytail_check(&oracle, 10, 10, &[0.1], 10, 0).is_err());
    }
}
