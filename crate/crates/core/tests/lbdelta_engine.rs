//! Noisy SGD on `½x²` against the running-mean closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgdlab::stochastic::{
    lbdelta_closed_form, suffix_average_identity, NoiseModel, QuadraticInstance, QuadraticOracle, SuffixNoiseSpec,
};
use sgdlab::{sgd_run, uniform_average, StepSchedule, Vector};

fn engine(signs: &[f64]) -> Vec<f64> {
    let oracle = QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::replay_signs(signs).unwrap()).unwrap();
    let inst = oracle.instance().clone();
    let trace = sgd_run(&oracle, inst.domain(), &Vector::scalar(0.0), &StepSchedule::InverseT, signs.len(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    trace.iterates().iter().map(|x| x[0]).collect()
}

#[test]
fn exhaustive_small_horizons() {
    for horizon in [1usize, 2, 5, 10] {
        for mask in 0u32..(1 << horizon) {
            let signs: Vec<f64> = (0..horizon).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let x = engine(&signs);
            let closed = lbdelta_closed_form(&signs).unwrap();
            assert_eq!(x[0], 0.0);
            for (a, b) in x[1..].iter().zip(&closed) {
                assert!((a - b).abs() <= 1e-14);
            }
        }
    }
}

#[test]
fn uniform_average_matches_independent_sum() {
    let signs = [1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0];
    let oracle = QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::replay_signs(&signs).unwrap()).unwrap();
    let trace = sgd_run(&oracle, oracle.instance().domain(), &Vector::scalar(0.0), &StepSchedule::InverseT, 7, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let mut sum = 0.0;
    let mut running = 0.0;
    for (i, s) in signs.iter().enumerate() {
        running += s;
        sum += running / (i + 1) as f64;
    }
    assert!((uniform_average(&trace)[0] - sum / 8.0).abs() <= 1e-15);
}

#[test]
fn suffix_identity_against_engine() {
    let horizon = 64;
    let spec = SuffixNoiseSpec::new(horizon).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let signs: Vec<f64> = spec.support().map(|_| if rng.random() { 1.0 } else { -1.0 }).collect();
        let z = spec.noise(&signs).unwrap();
        let oracle = QuadraticOracle::new(
            QuadraticInstance::interval(),
            NoiseModel::replay(z.iter().map(|&v| Vector::scalar(v)).collect()).unwrap(),
        )
        .unwrap();
        let trace = sgd_run(&oracle, oracle.instance().domain(), &Vector::scalar(0.0), &StepSchedule::InverseT, horizon, &mut rng).unwrap();
        let engine_lhs = trace.suffix_average(horizon / 2 + 1).unwrap()[0];
        let (lhs, rhs) = suffix_average_identity(&signs, horizon).unwrap();
        assert!((engine_lhs - lhs).abs() <= 1e-14);
        assert!((lhs - rhs).abs() <= 1e-12);
        let quarter: f64 = signs.iter().sum::<f64>() / (4.0 * (horizon / 2 + 1) as f64);
        assert!((rhs - quarter).abs() <= 1e-14);
    }
}

#[test]
fn quarter_rewriting_holds_at_large_horizons() {
    for horizon in [4, 8, 256, 4096] {
        let spec = SuffixNoiseSpec::new(horizon).unwrap();
        for t in spec.support() {
            let m = spec.magnitude(t).unwrap();
            assert!(m <= 1.0);
            assert!((spec.a(t) * m - 0.25).abs() <= f64::EPSILON / 4.0);
        }
    }
}
