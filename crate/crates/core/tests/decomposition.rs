//! Hand-checked and randomized cases of the last-iterate decomposition.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgdlab::concentration::{
    alpha_weight, alpha_weight_sum, compute_zt, compute_zt_reordered, decomposition_check,
};
use sgdlab::constructions::{Construction, LipschitzInstance, StronglyConvexInstance};
use sgdlab::stochastic::{NoiseModel, QuadraticInstance, QuadraticOracle};
use sgdlab::{sgd_run, Domain, StepSchedule, Vector};

fn replay_run(horizon: usize, z: Vec<f64>, schedule: StepSchedule, x1: f64) -> sgdlab::RunTrace {
    let draws = z.into_iter().map(Vector::scalar).collect();
    let oracle = QuadraticOracle::new(QuadraticInstance::interval(), NoiseModel::replay(draws).unwrap()).unwrap();
    sgd_run(&oracle, oracle.instance().domain(), &Vector::scalar(x1), &schedule, horizon, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
}

#[test]
fn horizon_two_by_hand() {
    let (z1, z2) = (0.7, -0.4);
    let trace = replay_run(2, vec![z1, z2], StepSchedule::InverseT, 0.5);
    // x_1 = ½, η_1 = 1: x_2 = x_1 − (x_1 − z_1) = z_1.
    let (x1, x2) = (0.5, z1);
    assert_eq!(trace.x(2)[0], x2);
    let f = |x: f64| 0.5 * x * x;
    let g1 = x1 - z1;
    let g2 = x2 - z2;
    let suffix = (f(x1) + f(x2)) / 2.0;
    let middle = (1.0 * g1 * g1 + 0.5 * g2 * g2) / 4.0;
    let noise = (z1 * 0.0 + z2 * (x2 - x1)) / 2.0;
    let r = decomposition_check(&trace, true).unwrap();
    assert!((r.f_last - f(x2)).abs() <= 1e-16);
    assert!((r.suffix_term - suffix).abs() <= 1e-16);
    assert!((r.middle_term - middle).abs() <= 1e-16);
    assert!((r.noise_term - noise).abs() <= 1e-16);
    assert_eq!(r.distance_term, 0.0);
    assert!(r.slack >= 0.0);
}

#[test]
fn horizon_four_two_formulas_and_by_hand() {
    let z = vec![0.9, -0.3, 0.5, -1.0];
    let trace = replay_run(4, z.clone(), StepSchedule::InverseT, 0.0);
    let x = |t: usize| trace.x(t)[0];
    // K = 2: k = 1 uses t ∈ {3, 4}; k = 2 uses t ∈ {2, 3, 4}.
    let k1 = (z[2] * (x(3) - x(3)) + z[3] * (x(4) - x(3))) / 2.0;
    let k2 = (z[1] * (x(2) - x(2)) + z[2] * (x(3) - x(2)) + z[3] * (x(4) - x(2))) / 6.0;
    let direct = compute_zt(&trace).unwrap();
    assert!((direct - (k1 + k2)).abs() <= 1e-16);
    assert!((compute_zt_reordered(&trace).unwrap() - direct).abs() <= 1e-16);
}

#[test]
fn deterministic_adversarial_runs_have_no_noise() {
    let sc = StronglyConvexInstance::new(64).unwrap();
    let trace = sgd_run(&sc, &sc.domain(), &Vector::zeros(64), &sc.schedule(), 64, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let r = decomposition_check(&trace, true).unwrap();
    assert_eq!(r.noise_term, 0.0);
    assert!(r.slack >= 0.0);

    let lip = LipschitzInstance::new(64, 1.0).unwrap();
    let trace = sgd_run(&lip, &lip.domain(), &Vector::zeros(64), &lip.schedule(), 64, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let r = decomposition_check(&trace, false).unwrap();
    assert_eq!(r.noise_term, 0.0);
    assert!(r.slack >= -1e-9);
}

#[test]
fn telescoping_weights_exhaustive() {
    for horizon in 3..=128 {
        for a in 1..horizon {
            let mut direct = 0.0;
            for b in a..horizon {
                direct += alpha_weight(horizon, b);
                if b > a {
                    assert!((direct - alpha_weight_sum(horizon, a, b)).abs() <= 1e-14, "T={horizon} a={a} b={b}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formulas_agree_and_slack_holds(seed in any::<u64>(), horizon in 2usize..80, dim in 1usize..4, sqrt in any::<bool>()) {
        let oracle = QuadraticOracle::new(QuadraticInstance::ball(dim).unwrap(), NoiseModel::uniform_sphere(dim).unwrap()).unwrap();
        let schedule = if sqrt { StepSchedule::InverseSqrtT } else { StepSchedule::InverseT };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = sgd_run(&oracle, &Domain::unit_ball(dim).unwrap(), &Vector::zeros(dim), &schedule, horizon, &mut rng).unwrap();
        let a = compute_zt(&trace).unwrap();
        let b = compute_zt_reordered(&trace).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        let r = decomposition_check(&trace, !sqrt).unwrap();
        prop_assert!(r.slack >= -1e-9);
    }
}
