use std::io::{self, Write};

use crate::error::{LabError, Result};
use crate::export::real;
use crate::schedule::StepSchedule;
use crate::sgd::RunTrace;
use crate::vector::Vector;

/// `α_j = 1/((T−j)(T−j+1))`, `1 ≤ j < T`.
pub fn alpha_weight(horizon: usize, j: usize) -> f64 {
    let a = (horizon - j) as f64;
    1.0 / (a * (a + 1.0))
}

/// `Σ_{j=a}^{b} α_j = 1/(T−b) − 1/(T−a+1)`.
pub fn alpha_weight_sum(horizon: usize, a: usize, b: usize) -> f64 {
    1.0 / (horizon - b) as f64 - 1.0 / (horizon - a + 1) as f64
}

fn zhat_dot(trace: &RunTrace, t: usize, v: &Vector) -> Result<f64> {
    Ok(trace.response(t).ok_or(LabError::Missing("oracle responses"))?.noise_dot(v))
}

fn half(trace: &RunTrace) -> Result<usize> {
    if !trace.has_responses() {
        return Err(LabError::Missing("oracle responses"));
    }
    if trace.horizon() < 2 {
        return Err(LabError::invalid("T", "the decomposition needs T ≥ 2"));
    }
    Ok(trace.horizon() / 2)
}

/// `Z_T = Σ_{k=1}^{⌊T/2⌋} 1/(k(k+1)) Σ_{t=T−k}^{T} ⟨ẑ_t, x_t − x_{T−k}⟩`,
/// summed directly.
pub fn compute_zt(trace: &RunTrace) -> Result<f64> {
    let kmax = half(trace)?;
    let horizon = trace.horizon();
    let mut total = 0.0;
    for k in 1..=kmax {
        let base = trace.x(horizon - k);
        let mut inner = 0.0;
        for t in horizon - k..=horizon {
            inner += zhat_dot(trace, t, &(trace.x(t) - base))?;
        }
        total += inner / (k * (k + 1)) as f64;
    }
    Ok(total)
}

/// `Z_T` as `Σ_t ⟨ẑ_t, w_t⟩` with `w_t = Σ_{j=T−⌊T/2⌋}^{t−1} α_j (x_t − x_j)`,
/// accumulated in one pass.
pub fn compute_zt_reordered(trace: &RunTrace) -> Result<f64> {
    let kmax = half(trace)?;
    let horizon = trace.horizon();
    let start = horizon - kmax;
    let mut weight = 0.0;
    let mut weighted_points = Vector::zeros(trace.dim());
    let mut total = 0.0;
    for t in start..=horizon {
        if t > start {
            let mut w = trace.x(t).scaled(weight);
            w.axpy(-1.0, &weighted_points);
            total += zhat_dot(trace, t, &w)?;
        }
        if t < horizon {
            let a = alpha_weight(horizon, t);
            weight += a;
            weighted_points.axpy(a, trace.x(t));
        }
    }
    Ok(total)
}

/// Terms of the exact last-iterate decomposition
/// `f(x_T) ≤ suffix + middle + distance + noise`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    /// `f(x_T)`
    pub f_last: f64,
    /// `(1/(K+1)) Σ_{t=T−K}^{T} f(x_t)` with `K = ⌊T/2⌋`.
    pub suffix_term: f64,
    /// `Σ_k 1/(2k(k+1)) Σ_{t=T−k}^{T} η_t ‖ĝ_t‖²`
    pub middle_term: f64,
    /// `Σ_k 1/(2k(k+1)) Σ_{t=T−k+1}^{T} (1/η_t − 1/η_{t−1} − μ) ‖x_t − x_{T−k}‖²`;
    /// identically zero when `μ = 1` and `η_t = 1/t`.
    pub distance_term: f64,
    /// `Z_T`
    pub noise_term: f64,
    /// Right-hand side minus `f(x_T)`.
    pub slack: f64,
}

/// Evaluate every term of the decomposition on a recorded run.
///
/// With `strongly_convex` the run must use `η_t = 1/t` and the function is
/// taken to be 1-strongly convex; otherwise the run must use `c/√t` and only
/// convexity is used.
pub fn decomposition_check(trace: &RunTrace, strongly_convex: bool) -> Result<DecompositionReport> {
    let kmax = half(trace)?;
    let horizon = trace.horizon();
    let schedule = trace.schedule();
    let mu = match (strongly_convex, schedule) {
        (true, StepSchedule::InverseT) => 1.0,
        (true, StepSchedule::InverseAlphaT { alpha }) if *alpha == 1.0 => 1.0,
        (false, StepSchedule::InverseSqrtT | StepSchedule::CInverseSqrtT { .. }) => 0.0,
        _ => {
            return Err(LabError::Mismatch(format!(
                "schedule {schedule} does not fit the {} decomposition",
                if strongly_convex { "strongly convex" } else { "Lipschitz" }
            )))
        }
    };
    let f_last = trace.f(horizon);
    let suffix_term = (horizon - kmax..=horizon).map(|t| trace.f(t)).sum::<f64>() / (kmax + 1) as f64;

    let mut step_energy = vec![0.0; horizon + 1];
    let mut coeff = vec![0.0; horizon + 1];
    for t in horizon - kmax..=horizon {
        let r = trace.response(t).ok_or(LabError::Missing("oracle responses"))?;
        step_energy[t] = schedule.value(t)? * r.ghat.norm_sq();
        if t >= 2 {
            coeff[t] = schedule.reciprocal(t)? - schedule.reciprocal(t - 1)? - mu;
        }
    }

    let (mut middle_term, mut distance_term) = (0.0, 0.0);
    for k in 1..=kmax {
        let w = 1.0 / (2 * k * (k + 1)) as f64;
        let base = trace.x(horizon - k);
        middle_term += w * step_energy[horizon - k..=horizon].iter().sum::<f64>();
        let dist: f64 = (horizon - k + 1..=horizon)
            .filter(|&t| coeff[t] != 0.0)
            .map(|t| coeff[t] * trace.x(t).dist_sq(base))
            .sum();
        distance_term += w * dist;
    }
    let noise_term = compute_zt(trace)?;
    let slack = suffix_term + middle_term + distance_term + noise_term - f_last;
    Ok(DecompositionReport {
        f_last,
        suffix_term,
        middle_term,
        distance_term,
        noise_term,
        slack,
    })
}

/// `replica,f_last,suffix,middle,noise,slack`; the distance term is folded
/// into `middle`.
pub fn write_decomposition_csv<W: Write>(reports: &[DecompositionReport], mut out: W) -> io::Result<()> {
    writeln!(out, "replica,f_last,suffix,middle,noise,slack")?;
    for (i, r) in reports.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            i,
            real(r.f_last),
            real(r.suffix_term),
            real(r.middle_term + r.distance_term),
            real(r.noise_term),
            real(r.slack)
        )?;
    }
    Ok(())
}
