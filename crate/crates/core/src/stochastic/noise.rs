use rand::Rng;
use rand_distr::StandardNormal;

use super::SuffixNoiseSpec;
use crate::error::{LabError, Result};
use crate::vector::Vector;

/// Sampler for the oracle noise `ẑ_t`. Every model is symmetric and draws
/// satisfy `‖ẑ‖ ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    /// `ẑ = 0`.
    None,
    /// `ẑ = ±1` in one dimension, each with probability ½.
    Rademacher1d,
    /// Uniform on the unit sphere in `dim` dimensions.
    UniformSphere { dim: usize },
    /// `ẑ_t = ±1/(4A_t)` on the middle quarter of the horizon, zero elsewhere.
    SuffixPattern(SuffixNoiseSpec),
    /// Fixed draws `ẑ_1, ẑ_2, …`; steps past the end get zero.
    Replay(Vec<Vector>),
}

impl NoiseModel {
    pub fn uniform_sphere(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(LabError::invalid("dim", "must be positive"));
        }
        Ok(NoiseModel::UniformSphere { dim })
    }

    pub fn suffix_pattern(horizon: usize) -> Result<Self> {
        Ok(NoiseModel::SuffixPattern(SuffixNoiseSpec::new(horizon)?))
    }

    /// Replay a recorded ±1 sign sequence in one dimension.
    pub fn replay_signs(signs: &[f64]) -> Result<Self> {
        let draws = signs
            .iter()
            .map(|&s| {
                if s.abs() <= 1.0 {
                    Ok(Vector::scalar(s))
                } else {
                    Err(LabError::invalid("signs", format!("|{s}| exceeds 1")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NoiseModel::Replay(draws))
    }

    /// Replay arbitrary draws, each of norm at most one and of common dimension.
    pub fn replay(draws: Vec<Vector>) -> Result<Self> {
        if let Some(first) = draws.first() {
            for z in &draws {
                z.ensure_dim(first.dim())?;
                if !(z.norm() <= 1.0) {
                    return Err(LabError::invalid("draws", "every draw must have norm ≤ 1"));
                }
            }
        }
        Ok(NoiseModel::Replay(draws))
    }

    /// Dimension of the draws, if the model fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            NoiseModel::None => None,
            NoiseModel::Rademacher1d | NoiseModel::SuffixPattern(_) => Some(1),
            NoiseModel::UniformSphere { dim } => Some(*dim),
            NoiseModel::Replay(draws) => draws.first().map(Vector::dim),
        }
    }

    /// Draw `ẑ_t`; `None` stands for exactly zero.
    pub fn sample<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Option<Vector> {
        match self {
            NoiseModel::None => None,
            NoiseModel::Rademacher1d => Some(Vector::scalar(rademacher(rng))),
            NoiseModel::UniformSphere { dim } => Some(sphere(*dim, rng)),
            NoiseModel::SuffixPattern(spec) => {
                let m = spec.magnitude(t)?;
                Some(Vector::scalar(m * rademacher(rng)))
            }
            NoiseModel::Replay(draws) => t.checked_sub(1).and_then(|i| draws.get(i)).cloned(),
        }
    }
}

fn rademacher<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    loop {
        let mut z = Vector::from_vec((0..dim).map(|_| rng.sample(StandardNormal)).collect());
        let n = z.norm();
        if n > 0.0 {
            z.scale(1.0 / n);
            return z;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rademacher_mean_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let sum: f64 = (1..=n).map(|t| NoiseModel::Rademacher1d.sample(t, &mut rng).unwrap()[0]).sum();
        assert!((sum / n as f64).abs() <= 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn sphere_draws_are_unit_and_centered() {
        let model = NoiseModel::uniform_sphere(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 20_000;
        let mut acc = Vector::zeros(5);
        for t in 1..=n {
            let z = model.sample(t, &mut rng).unwrap();
            assert!((z.norm() - 1.0).abs() <= 1e-15);
            acc.axpy(1.0, &z);
        }
        acc.scale(1.0 / n as f64);
        assert!(acc.norm() <= 4.0 * 5f64.sqrt() / (n as f64).sqrt());
    }

    #[test]
    fn suffix_pattern_support() {
        let model = NoiseModel::suffix_pattern(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for t in 1..=16 {
            let z = model.sample(t, &mut rng);
            assert_eq!(z.is_some(), (8..=12).contains(&t), "t = {t}");
            if let Some(z) = z {
                assert!(z.norm() <= 1.0);
            }
        }
        assert!(NoiseModel::suffix_pattern(18).is_err());
    }

    #[test]
    fn replay_returns_draws_in_order() {
        let model = NoiseModel::replay_signs(&[1.0, -1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(model.sample(1, &mut rng), Some(Vector::scalar(1.0)));
        assert_eq!(model.sample(2, &mut rng), Some(Vector::scalar(-1.0)));
        assert_eq!(model.sample(3, &mut rng), None);
        assert!(NoiseModel::replay_signs(&[2.0]).is_err());
        assert!(NoiseModel::replay(vec![Vector::zeros(1), Vector::zeros(2)]).is_err());
        assert!(NoiseModel::uniform_sphere(0).is_err());
    }
}
