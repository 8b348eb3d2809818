//! The 1-Lipschitz instance on which the `c/√t` final iterate is a `log T`
//! factor worse than optimal and `f` increases along the first `T` steps.
//!
//! `f(x) = max_{i ≤ T+1} h_i·x` over the unit ball of `R^T`, with
//! `a_i = 1/(8c(T−i+1))` below the diagonal and `−b_i = −√i/(2c√T)` on it.

use rand::Rng;

use super::staircase::Staircase;
use super::Construction;
use crate::domain::Domain;
use crate::error::{LabError, Result};
use crate::schedule::StepSchedule;
use crate::sgd::{Oracle, OracleResponse, Query, RunTrace};
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzInstance {
    horizon: usize,
    c: f64,
    stairs: Staircase,
    /// `inv_sqrt_prefix[m] = Σ_{k=1}^{m} 1/√k`, `m = 0..=T`.
    inv_sqrt_prefix: Vec<f64>,
}

impl LipschitzInstance {
    pub fn new(horizon: usize, c: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(LabError::invalid("T", "horizon must be positive"));
        }
        if !(c >= 1.0 && c.is_finite()) {
            return Err(LabError::invalid("c", format!("{c} must be a finite real ≥ 1")));
        }
        let t = horizon as f64;
        let a = (1..=horizon)
            .map(|i| 1.0 / (8.0 * c * (t - i as f64 + 1.0)))
            .collect();
        let b = (1..=horizon)
            .map(|i| (i as f64).sqrt() / (2.0 * c * t.sqrt()))
            .collect();
        let mut inv_sqrt_prefix = Vec::with_capacity(horizon + 1);
        let mut acc = 0.0;
        inv_sqrt_prefix.push(acc);
        for k in 1..=horizon {
            acc += 1.0 / (k as f64).sqrt();
            inv_sqrt_prefix.push(acc);
        }
        let inst = LipschitzInstance {
            horizon,
            c,
            stairs: Staircase::new(a, b),
            inv_sqrt_prefix,
        };
        let norm_sq = inst.max_row_norm_sq();
        if norm_sq >= 0.5 {
            return Err(LabError::invalid(
                "T",
                format!("row norm certificate failed: max ‖h_i‖² = {norm_sq}"),
            ));
        }
        Ok(inst)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> &[f64] {
        self.stairs.below()
    }

    pub fn b(&self) -> &[f64] {
        self.stairs.diag()
    }

    pub fn h(&self, i: usize) -> Vector {
        self.stairs.row(i)
    }

    pub fn dense_rows(&self) -> Result<Vec<Vector>> {
        self.stairs.dense_rows()
    }

    /// `max_i ‖h_i‖²`; below 1/2 by construction.
    pub fn max_row_norm_sq(&self) -> f64 {
        self.stairs.max_row_norm_sq()
    }

    pub fn eval(&self, x: &Vector) -> (f64, usize) {
        self.stairs.eval(x, 0.0)
    }

    pub fn active_set(&self, x: &Vector) -> Vec<usize> {
        self.stairs.active_set(x, 0.0)
    }

    /// The deterministic response `h_{i'}`.
    pub fn respond(&self, x: &Vector) -> OracleResponse {
        let (_, i) = self.eval(x);
        OracleResponse::exact(self.h(i), Some(i))
    }

    /// `z_t`: zero for `t = 1`, else `c(b_j/√j − a_j Σ_{k=j+1}^{t−1} 1/√k)` on `j < t`.
    pub fn predicted_iterate(&self, t: usize) -> Result<Vector> {
        LabError::check_range("t", t, 1, self.horizon + 1)?;
        let mut z = Vector::zeros(self.horizon);
        let (a, b) = (self.a(), self.b());
        for j in 1..t {
            let tail = self.inv_sqrt_prefix[t - 1] - self.inv_sqrt_prefix[j];
            z[j - 1] = self.c * (b[j - 1] / (j as f64).sqrt() - a[j - 1] * tail);
        }
        Ok(z)
    }
}

impl Oracle for LipschitzInstance {
    fn value(&self, x: &Vector) -> f64 {
        self.eval(x).0
    }

    fn query<R: Rng + ?Sized>(&self, x: &Vector, _t: usize, _rng: &mut R) -> Query {
        let (value, i) = self.eval(x);
        Query {
            value,
            response: OracleResponse::exact(self.h(i), Some(i)),
        }
    }
}

impl Construction for LipschitzInstance {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn eval(&self, x: &Vector) -> (f64, usize) {
        LipschitzInstance::eval(self, x)
    }

    fn predicted_iterate(&self, t: usize) -> Result<Vector> {
        LipschitzInstance::predicted_iterate(self, t)
    }

    fn schedule(&self) -> StepSchedule {
        StepSchedule::CInverseSqrtT { c: self.c }
    }

    fn domain(&self) -> Domain {
        Domain::unit_ball(self.horizon).expect("horizon is positive")
    }

    fn final_lower_bound(&self) -> Result<f64> {
        lip_lower_bound(self.horizon, self.c)
    }

    fn suffix_lower_bound(&self, k: usize) -> Result<f64> {
        lip_suffix_lower_bound(self.horizon, k, self.c)
    }

    /// The last `k` of the first `T` iterates, `x_{T−k+1..T}`.
    fn suffix_window(&self, k: usize) -> Result<std::ops::RangeInclusive<usize>> {
        LabError::check_range("k", k, 1, self.horizon)?;
        Ok(self.horizon + 1 - k..=self.horizon)
    }
}

pub fn lip_eval(inst: &LipschitzInstance, x: &Vector) -> (f64, usize) {
    inst.eval(x)
}

pub fn lip_oracle(inst: &LipschitzInstance, x: &Vector) -> OracleResponse {
    inst.respond(x)
}

pub fn lip_predicted_iterate(inst: &LipschitzInstance, t: usize) -> Result<Vector> {
    inst.predicted_iterate(t)
}

fn check_c(c: f64) -> Result<()> {
    if c >= 1.0 && c.is_finite() {
        Ok(())
    } else {
        Err(LabError::invalid("c", format!("{c} must be a finite real ≥ 1")))
    }
}

/// `ln T / (32 c √T)`.
pub fn lip_lower_bound(horizon: usize, c: f64) -> Result<f64> {
    if horizon < 2 {
        return Err(LabError::invalid("T", "T must be ≥ 2"));
    }
    check_c(c)?;
    let t = horizon as f64;
    Ok(t.ln() / (32.0 * c * t.sqrt()))
}

/// `(ln T − ln(k+1)) / (16 c √T)` for convex combinations of `x_{T−k+1..T}`.
///
/// This is the published suffix constant (stated for `c = 1`). It is not
/// implied by the coordinate floor `z_{t,j} ≥ 1/(4√T)` and fails for small
/// `k`; see [`lip_suffix_lower_bound_from_floor`].
pub fn lip_suffix_lower_bound(horizon: usize, k: usize, c: f64) -> Result<f64> {
    LabError::check_range("k", k, 1, horizon)?;
    check_c(c)?;
    let t = horizon as f64;
    Ok((t.ln() - ((k + 1) as f64).ln()) / (16.0 * c * t.sqrt()))
}

/// `(ln T − ln(k+1)) / (32 c √T)`: what `x̄_j ≥ 1/(4√T)` on `j ≤ T−k` and
/// `a_j = 1/(8c(T−j+1))` give through `h_T·x̄`.
pub fn lip_suffix_lower_bound_from_floor(horizon: usize, k: usize, c: f64) -> Result<f64> {
    LabError::check_range("k", k, 1, horizon)?;
    check_c(c)?;
    let t = horizon as f64;
    Ok((t.ln() - ((k + 1) as f64).ln()) / (32.0 * c * t.sqrt()))
}

/// One per-step monotonicity check `f(x_{i+1}) − f(x_i) ≥ required`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneCheck {
    pub i: usize,
    pub gap: f64,
    pub required: f64,
}

impl MonotoneCheck {
    pub fn passed(&self) -> bool {
        self.gap >= self.required
    }
}

/// For each `i ∈ 1..=T`, compare `f(x_{i+1}) − f(x_i)` (re-evaluated on the
/// instance) with `1/(32c√T(T−i+1))`.
pub fn monotonicity_certificate(trace: &RunTrace, inst: &LipschitzInstance) -> Result<Vec<MonotoneCheck>> {
    let horizon = inst.horizon;
    if trace.horizon() != horizon || trace.dim() != horizon {
        return Err(LabError::Mismatch(format!(
            "trace has T = {} and dimension {}, instance has T = {horizon}",
            trace.horizon(),
            trace.dim()
        )));
    }
    let schedule_ok = match *trace.schedule() {
        StepSchedule::CInverseSqrtT { c } => c == inst.c,
        StepSchedule::InverseSqrtT => inst.c == 1.0,
        _ => false,
    };
    if !schedule_ok {
        return Err(LabError::Mismatch(format!(
            "trace schedule {} is not c/√t with c = {}",
            trace.schedule(),
            inst.c
        )));
    }
    let root_t = (horizon as f64).sqrt();
    let mut prev = inst.eval(trace.x(1)).0;
    Ok((1..=horizon)
        .map(|i| {
            let next = inst.eval(trace.x(i + 1)).0;
            let check = MonotoneCheck {
                i,
                gap: next - prev,
                required: 1.0 / (32.0 * inst.c * root_t * (horizon - i + 1) as f64),
            };
            prev = next;
            check
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_and_rows() {
        let inst = LipschitzInstance::new(4, 1.0).unwrap();
        assert_eq!(inst.a()[0], 1.0 / 32.0);
        assert_eq!(inst.b()[0], 1.0 / 4.0);
        assert_eq!(inst.h(1).as_slice(), &[-0.25, 0.0, 0.0, 0.0]);
        assert!(inst.max_row_norm_sq() < 0.5);
        assert!(LipschitzInstance::new(4, 0.9).is_err());
        assert!(LipschitzInstance::new(0, 1.0).is_err());
    }

    #[test]
    fn oracle_at_origin() {
        let inst = LipschitzInstance::new(9, 2.0).unwrap();
        assert_eq!(lip_eval(&inst, &Vector::zeros(9)), (0.0, 1));
        let r = lip_oracle(&inst, &Vector::zeros(9));
        let mut expected = Vector::zeros(9);
        expected[0] = -1.0 / (2.0 * 2.0 * 3.0);
        assert_eq!(r.ghat, expected);
    }

    #[test]
    fn predicted_iterates() {
        let inst = LipschitzInstance::new(4, 1.0).unwrap();
        assert_eq!(inst.predicted_iterate(1).unwrap(), Vector::zeros(4));
        let z3 = inst.predicted_iterate(3).unwrap();
        // 1/4 − (1/32)/√2
        assert!((z3[0] - 0.227_902_913_087_920_4).abs() < 1e-15);
        for t in 2..=5 {
            let z = inst.predicted_iterate(t).unwrap();
            assert!((z[t - 2] - 0.25).abs() < 1e-15, "empty tail sum at j = t−1");
        }
    }

    #[test]
    fn active_set_at_predicted_iterates() {
        for c in [1.0, 2.0] {
            let inst = LipschitzInstance::new(10, c).unwrap();
            for t in 1..=11 {
                let z = inst.predicted_iterate(t).unwrap();
                assert_eq!(inst.active_set(&z), (t..=11).collect::<Vec<_>>());
                assert_eq!(inst.respond(&z).ghat, inst.h(t));
            }
        }
    }

    #[test]
    fn bounds() {
        assert!((lip_lower_bound(100, 1.0).unwrap() - 0.014_391_156_831_212_787).abs() < 1e-15);
        assert!(lip_lower_bound(1, 1.0).is_err());
        assert!(lip_lower_bound(10, 0.5).is_err());
        assert!(lip_suffix_lower_bound(10, 11, 1.0).is_err());
        let strong = lip_suffix_lower_bound(256, 4, 1.0).unwrap();
        let floor = lip_suffix_lower_bound_from_floor(256, 4, 1.0).unwrap();
        assert!((strong - 2.0 * floor).abs() < 1e-18);
    }
}
