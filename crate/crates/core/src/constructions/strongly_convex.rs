//! The 1-strongly convex, 3-Lipschitz instance on which the `1/t` final
//! iterate is a `log T` factor worse than optimal.
//!
//! `f(x) = max_{i ≤ T+1} h_i·x + ½‖x‖²` over the unit ball of `R^T`, with
//! `a_j = 1/(2(T+1−j))` below the diagonal and `−1` on it.

use rand::Rng;

use super::staircase::Staircase;
use super::Construction;
use crate::domain::Domain;
use crate::error::{LabError, Result};
use crate::schedule::StepSchedule;
use crate::sgd::{Oracle, OracleResponse, Query};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct StronglyConvexInstance {
    horizon: usize,
    stairs: Staircase,
}

impl StronglyConvexInstance {
    pub fn new(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(LabError::invalid("T", "horizon must be positive"));
        }
        let t = horizon as f64;
        let a = (1..=horizon)
            .map(|j| 1.0 / (2.0 * (t + 1.0 - j as f64)))
            .collect();
        let inst = StronglyConvexInstance {
            horizon,
            stairs: Staircase::new(a, vec![1.0; horizon]),
        };
        let norm_sq = inst.max_row_norm_sq();
        if norm_sq >= 1.5 {
            return Err(LabError::invalid(
                "T",
                format!("row norm certificate failed: max ‖h_i‖² = {norm_sq}"),
            ));
        }
        Ok(inst)
    }

    /// `a_1..a_T`.
    pub fn a(&self) -> &[f64] {
        self.stairs.below()
    }

    /// `h_i` for `i ∈ 1..=T+1`.
    pub fn h(&self, i: usize) -> Vector {
        self.stairs.row(i)
    }

    /// All `T+1` rows; only for `T ≤ 64`.
    pub fn dense_rows(&self) -> Result<Vec<Vector>> {
        self.stairs.dense_rows()
    }

    /// `max_i ‖h_i‖²`; below 3/2 by construction.
    pub fn max_row_norm_sq(&self) -> f64 {
        self.stairs.max_row_norm_sq()
    }

    /// `f(x)` and the smallest maximizing hyperplane index.
    pub fn eval(&self, x: &Vector) -> (f64, usize) {
        self.stairs.eval(x, 0.5 * x.norm_sq())
    }

    pub fn active_set(&self, x: &Vector) -> Vec<usize> {
        self.stairs.active_set(x, 0.5 * x.norm_sq())
    }

    /// The deterministic response `h_{i'} + x`.
    pub fn respond(&self, x: &Vector) -> OracleResponse {
        let (_, i) = self.eval(x);
        let mut g = self.h(i);
        g.axpy(1.0, x);
        OracleResponse::exact(g, Some(i))
    }

    /// `z_t`: zero for `t = 1`, else `(1 − (t−j−1)a_j)/(t−1)` on `j < t`.
    pub fn predicted_iterate(&self, t: usize) -> Result<Vector> {
        LabError::check_range("t", t, 1, self.horizon + 1)?;
        let mut z = Vector::zeros(self.horizon);
        if t > 1 {
            let denom = (t - 1) as f64;
            let a = self.a();
            for j in 1..t {
                z[j - 1] = (1.0 - (t - j - 1) as f64 * a[j - 1]) / denom;
            }
        }
        Ok(z)
    }
}

impl Oracle for StronglyConvexInstance {
    fn value(&self, x: &Vector) -> f64 {
        self.eval(x).0
    }

    fn query<R: Rng + ?Sized>(&self, x: &Vector, _t: usize, _rng: &mut R) -> Query {
        let (value, i) = self.eval(x);
        let mut g = self.h(i);
        g.axpy(1.0, x);
        Query {
            value,
            response: OracleResponse::exact(g, Some(i)),
        }
    }
}

impl Construction for StronglyConvexInstance {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn eval(&self, x: &Vector) -> (f64, usize) {
        StronglyConvexInstance::eval(self, x)
    }

    fn predicted_iterate(&self, t: usize) -> Result<Vector> {
        StronglyConvexInstance::predicted_iterate(self, t)
    }

    fn schedule(&self) -> StepSchedule {
        StepSchedule::InverseT
    }

    fn domain(&self) -> Domain {
        Domain::unit_ball(self.horizon).expect("horizon is positive")
    }

    fn final_lower_bound(&self) -> Result<f64> {
        sc_lower_bound(self.horizon)
    }

    fn suffix_lower_bound(&self, k: usize) -> Result<f64> {
        sc_suffix_lower_bound(self.horizon, k)
    }

    fn suffix_window(&self, k: usize) -> Result<std::ops::RangeInclusive<usize>> {
        LabError::check_range("k", k, 1, self.horizon)?;
        Ok(self.horizon + 2 - k..=self.horizon + 1)
    }
}

pub fn sc_eval(inst: &StronglyConvexInstance, x: &Vector) -> (f64, usize) {
    inst.eval(x)
}

pub fn sc_oracle(inst: &StronglyConvexInstance, x: &Vector) -> OracleResponse {
    inst.respond(x)
}

pub fn sc_predicted_iterate(inst: &StronglyConvexInstance, t: usize) -> Result<Vector> {
    inst.predicted_iterate(t)
}

/// `ln T / (4T)`.
pub fn sc_lower_bound(horizon: usize) -> Result<f64> {
    if horizon < 2 {
        return Err(LabError::invalid("T", "T must be ≥ 2"));
    }
    let t = horizon as f64;
    Ok(t.ln() / (4.0 * t))
}

/// `(ln T − ln k) / (4T)` for any convex combination of the last `k` iterates.
pub fn sc_suffix_lower_bound(horizon: usize, k: usize) -> Result<f64> {
    LabError::check_range("k", k, 1, horizon)?;
    let t = horizon as f64;
    Ok((t.ln() - (k as f64).ln()) / (4.0 * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coefficients() {
        let inst = StronglyConvexInstance::new(4).unwrap();
        assert_eq!(inst.a(), &[1.0 / 8.0, 1.0 / 6.0, 1.0 / 4.0, 1.0 / 2.0]);
        assert!(inst.a().windows(2).all(|w| w[0] < w[1]));
        assert!(inst.a().iter().all(|&a| a > 0.0 && a <= 0.5));
        assert_eq!(inst.h(1).as_slice(), &[-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(inst.h(5).as_slice(), inst.a());
    }

    #[test]
    fn value_at_origin() {
        let inst = StronglyConvexInstance::new(6).unwrap();
        assert_eq!(sc_eval(&inst, &Vector::zeros(6)), (0.0, 1));
        let r = sc_oracle(&inst, &Vector::zeros(6));
        assert_eq!(r.ghat, Vector::from_slice(&[-1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(r.zhat, None);
    }

    #[test]
    fn predicted_iterates() {
        let inst = StronglyConvexInstance::new(4).unwrap();
        assert_eq!(inst.predicted_iterate(1).unwrap(), Vector::zeros(4));
        assert_eq!(inst.predicted_iterate(2).unwrap(), Vector::basis(4, 1));
        assert_eq!(inst.predicted_iterate(3).unwrap()[0], 7.0 / 16.0);
        assert!(inst.predicted_iterate(0).is_err());
        assert!(inst.predicted_iterate(6).is_err());
    }

    #[test]
    fn active_set_at_predicted_iterates() {
        let inst = StronglyConvexInstance::new(12).unwrap();
        for t in 1..=13 {
            let z = inst.predicted_iterate(t).unwrap();
            assert_eq!(inst.active_set(&z), (t..=13).collect::<Vec<_>>(), "t = {t}");
            let r = inst.respond(&z);
            assert_eq!(r.ghat, &inst.h(t) + &z);
        }
    }

    #[test]
    fn oracle_trait_agrees_with_respond() {
        let inst = StronglyConvexInstance::new(5).unwrap();
        let x = Vector::from_slice(&[0.1, 0.3, -0.2, 0.0, 0.05]);
        let q = inst.query(&x, 1, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(q.response, inst.respond(&x));
        assert_eq!(q.value, inst.eval(&x).0);
    }

    #[test]
    fn bounds() {
        assert!((sc_lower_bound(100).unwrap() - 100f64.ln() / 400.0).abs() < 1e-17);
        assert!((sc_lower_bound(100).unwrap() - 0.011_512_925_464_970_229).abs() < 1e-15);
        assert!((sc_suffix_lower_bound(64, 4).unwrap() - 0.010_830_424_696_249_145).abs() < 1e-15);
        assert_eq!(sc_suffix_lower_bound(64, 64).unwrap(), 0.0);
        assert_eq!(sc_suffix_lower_bound(64, 1).unwrap(), sc_lower_bound(64).unwrap());
        assert!(sc_lower_bound(1).is_err());
        assert!(sc_suffix_lower_bound(64, 0).is_err());
        assert!(sc_suffix_lower_bound(64, 65).is_err());
        for t in 2..200 {
            assert!(sc_lower_bound(t).unwrap() > 0.0);
        }
    }
}
