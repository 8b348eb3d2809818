use std::fmt;

use crate::error::{LabError, Result};

/// Step-size rule `η_t`, indexed from `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `1/t`
    InverseT,
    /// `1/(αt)`
    InverseAlphaT { alpha: f64 },
    /// `1/√t`
    InverseSqrtT,
    /// `c/√t` with `c ≥ 1`
    CInverseSqrtT { c: f64 },
}

impl StepSchedule {
    pub fn inverse_alpha_t(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LabError::invalid("alpha", format!("{alpha} is not a positive real")));
        }
        Ok(StepSchedule::InverseAlphaT { alpha })
    }

    pub fn c_inverse_sqrt_t(c: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(LabError::invalid("c", format!("{c} must be a finite real ≥ 1")));
        }
        Ok(StepSchedule::CInverseSqrtT { c })
    }

    pub fn value(&self, t: usize) -> Result<f64> {
        if t == 0 {
            return Err(LabError::invalid("t", "step index starts at 1"));
        }
        let t = t as f64;
        Ok(match *self {
            StepSchedule::InverseT => 1.0 / t,
            StepSchedule::InverseAlphaT { alpha } => 1.0 / (alpha * t),
            StepSchedule::InverseSqrtT => 1.0 / t.sqrt(),
            StepSchedule::CInverseSqrtT { c } => c / t.sqrt(),
        })
    }

    /// `1/η_t`, computed directly rather than by inverting [`Self::value`]
    /// so that `1/η_t − 1/η_{t−1}` is exact for the `1/t` rule.
    pub fn reciprocal(&self, t: usize) -> Result<f64> {
        if t == 0 {
            return Err(LabError::invalid("t", "step index starts at 1"));
        }
        let t = t as f64;
        Ok(match *self {
            StepSchedule::InverseT => t,
            StepSchedule::InverseAlphaT { alpha } => alpha * t,
            StepSchedule::InverseSqrtT => t.sqrt(),
            StepSchedule::CInverseSqrtT { c } => t.sqrt() / c,
        })
    }
}

impl fmt::Display for StepSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StepSchedule::InverseT => write!(f, "inverse-t"),
            StepSchedule::InverseAlphaT { alpha } => write!(f, "inverse-alpha-t({alpha})"),
            StepSchedule::InverseSqrtT => write!(f, "inverse-sqrt-t"),
            StepSchedule::CInverseSqrtT { c } => write!(f, "c-inverse-sqrt-t({c})"),
        }
    }
}

/// Free-function form of [`StepSchedule::value`].
pub fn schedule_value(schedule: &StepSchedule, t: usize) -> Result<f64> {
    schedule.value(t)
}
