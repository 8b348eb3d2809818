//! Property tests over the engine and the tail tools.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgdlab::concentration::{recursive_K, simulate_recursive, wilson_interval, RecursiveProcessSpec};
use sgdlab::stochastic::{NoiseModel, QuadraticInstance, QuadraticOracle};
use sgdlab::{sgd_run, suffix_average, uniform_average, Domain, StepSchedule, Vector};

fn coeffs(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(0.0f64..0.999, n),
        prop::collection::vec(0.0f64..5.0, n),
        prop::collection::vec(0.0f64..5.0, n),
    )
}

proptest! {
    #[test]
    fn recursive_k_is_the_brute_force_max((a, b, g) in coeffs(10)) {
        let spec = RecursiveProcessSpec::new(a.clone(), b.clone(), g.clone()).unwrap();
        let mut candidates = Vec::new();
        for i in 0..10 {
            candidates.push(2.0 * g[i] / (1.0 - a[i]));
            candidates.push(2.0 * b[i] * b[i] / (1.0 - a[i]));
        }
        let brute = candidates.into_iter().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(recursive_K(&spec), brute);
    }

    #[test]
    fn deterministic_recursion_without_noise_term((a, _b, g) in coeffs(30), seed in any::<u64>()) {
        let spec = RecursiveProcessSpec::new(a.clone(), vec![0.0; 30], g.clone()).unwrap();
        let xs = simulate_recursive(&spec, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut x = 0.0;
        prop_assert_eq!(xs[0], 0.0);
        for t in 1..30 {
            x = a[t - 1] * x + g[t - 1];
            prop_assert_eq!(xs[t], x);
        }
    }

    #[test]
    fn wilson_contains_the_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let hits = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(hits, trials);
        let p = hits as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }

    #[test]
    fn runs_are_reproducible_and_feasible(seed in any::<u64>(), dim in 1usize..5, horizon in 1usize..60) {
        let oracle = QuadraticOracle::new(QuadraticInstance::ball(dim).unwrap(), NoiseModel::uniform_sphere(dim).unwrap()).unwrap();
        let domain = Domain::unit_ball(dim).unwrap();
        let run = || sgd_run(&oracle, &domain, &Vector::zeros(dim), &StepSchedule::InverseT, horizon, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let (a, b) = (run(), run());
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iterates().iter().all(|x| domain.contains(x)));
        let full = suffix_average(&a, horizon + 1).unwrap();
        prop_assert!(full.dist_inf(&uniform_average(&a)) <= 1e-15);
        prop_assert_eq!(suffix_average(&a, 1).unwrap(), a.final_iterate().clone());
    }
}
