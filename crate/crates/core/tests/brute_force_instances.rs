//! The staircase instances against a dense, independently written
//! max-of-hyperplanes oracle and a plain projected-descent loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgdlab::constructions::{Construction, LipschitzInstance, StronglyConvexInstance};
use sgdlab::{sgd_run, Vector};

fn dense_rows(below: &[f64], diag: &[f64]) -> Vec<Vec<f64>> {
    let n = below.len();
    (1..=n + 1)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    if j < i {
                        below[j - 1]
                    } else if j == i {
                        -diag[j - 1]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn argmax_smallest(vals: &[f64]) -> (f64, usize) {
    let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * (1.0 + m.abs());
    let i = vals.iter().position(|&v| v >= m - tol).unwrap();
    (m, i)
}

/// Plain loop: `x ← Π(x − η_t g)` over the unit ball.
fn descend(rows: &[Vec<f64>], quad: bool, eta: impl Fn(usize) -> f64, horizon: usize) -> Vec<Vec<f64>> {
    let n = horizon;
    let mut x = vec![0.0; n];
    let mut out = vec![x.clone()];
    for t in 1..=horizon {
        let vals: Vec<f64> = rows.iter().map(|h| h.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        let (_, i) = argmax_smallest(&vals);
        let g: Vec<f64> = (0..n).map(|j| rows[i][j] + if quad { x[j] } else { 0.0 }).collect();
        let y: Vec<f64> = (0..n).map(|j| x[j] - eta(t) * g[j]).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = if norm > 1.0 { y.iter().map(|v| v / norm).collect() } else { y };
        out.push(x.clone());
    }
    out
}

#[test]
fn strongly_convex_t6() {
    let horizon = 6;
    let inst = StronglyConvexInstance::new(horizon).unwrap();
    let below: Vec<f64> = (1..=horizon).map(|j| 1.0 / (2.0 * (horizon + 1 - j) as f64)).collect();
    let rows = dense_rows(&below, &vec![1.0; horizon]);
    assert_eq!(inst.dense_rows().unwrap().iter().map(Vector::to_vec).collect::<Vec<_>>(), rows);

    let reference = descend(&rows, true, |t| 1.0 / t as f64, horizon);
    let trace = sgd_run(&inst, &inst.domain(), &Vector::zeros(horizon), &inst.schedule(), horizon, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    for t in 1..=horizon + 1 {
        let got = trace.x(t).to_vec();
        let err = got.iter().zip(&reference[t - 1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-15, "t = {t}");
        assert!(inst.predicted_iterate(t).unwrap().dist_inf(trace.x(t)) <= 1e-15);
        let vals: Vec<f64> = rows.iter().map(|h| h.iter().zip(&got).map(|(a, b)| a * b).sum()).collect();
        let (m, _) = argmax_smallest(&vals);
        let f = m + 0.5 * got.iter().map(|v| v * v).sum::<f64>();
        assert!((f - trace.f(t)).abs() <= 1e-15);
    }
}

#[test]
fn lipschitz_t5() {
    let horizon = 5;
    for c in [1.0, 2.0, 3.5] {
        let inst = LipschitzInstance::new(horizon, c).unwrap();
        let t = horizon as f64;
        let below: Vec<f64> = (1..=horizon).map(|i| 1.0 / (8.0 * c * (t - i as f64 + 1.0))).collect();
        let diag: Vec<f64> = (1..=horizon).map(|i| (i as f64).sqrt() / (2.0 * c * t.sqrt())).collect();
        let rows = dense_rows(&below, &diag);
        let reference = descend(&rows, false, |s| c / (s as f64).sqrt(), horizon);
        let trace = sgd_run(&inst, &inst.domain(), &Vector::zeros(horizon), &inst.schedule(), horizon, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for s in 1..=horizon + 1 {
            let err = trace.x(s).to_vec().iter().zip(&reference[s - 1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-15, "c = {c}, t = {s}");
            assert!(inst.predicted_iterate(s).unwrap().dist_inf(trace.x(s)) <= 1e-14);
        }
    }
}

#[test]
fn the_last_hyperplane_is_the_active_one_at_the_end() {
    let inst = StronglyConvexInstance::new(12).unwrap();
    let z = inst.predicted_iterate(13).unwrap();
    let (_, i) = inst.eval(&z);
    assert_eq!(i, 13);
}
