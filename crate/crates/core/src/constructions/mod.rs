//! Deterministic worst-case instances for projected subgradient descent,
//! their closed-form iterates, and numeric lower-bound certificates.

mod certificates;
mod coupling;
mod descriptor;
mod lipschitz;
mod staircase;
mod strongly_convex;

use std::ops::RangeInclusive;

pub use certificates::{
    deterministic_suite, iterate_identity, stream_iterate_identity, suffix_combination_value, CertificateReport, CertificateRow,
    IterateMatch,
};
pub use coupling::{couple_runs, CoupledRuns, RescaledOracle};
pub use descriptor::{Family, InstanceDescriptor};
pub use lipschitz::{
    lip_eval, lip_lower_bound, lip_oracle, lip_predicted_iterate, lip_suffix_lower_bound,
    lip_suffix_lower_bound_from_floor, monotonicity_certificate, LipschitzInstance, MonotoneCheck,
};
pub use staircase::DENSE_LIMIT;
pub use strongly_convex::{
    sc_eval, sc_lower_bound, sc_oracle, sc_predicted_iterate, sc_suffix_lower_bound, StronglyConvexInstance,
};

use crate::domain::Domain;
use crate::error::Result;
use crate::schedule::StepSchedule;
use crate::sgd::Oracle;
use crate::vector::Vector;

/// Shared surface of the two adversarial families.
pub trait Construction: Oracle {
    /// `T`; also the ambient dimension.
    fn horizon(&self) -> usize;

    /// `f(x)` and the tie-broken active hyperplane.
    fn eval(&self, x: &Vector) -> (f64, usize);

    /// The closed-form `z_t`, `t ∈ 1..=T+1`.
    fn predicted_iterate(&self, t: usize) -> Result<Vector>;

    /// The step rule under which SGD reproduces `z_t`.
    fn schedule(&self) -> StepSchedule;

    fn domain(&self) -> Domain;

    fn final_lower_bound(&self) -> Result<f64>;

    fn suffix_lower_bound(&self, k: usize) -> Result<f64>;

    /// 1-based iterate indices whose convex combinations the suffix bound covers.
    fn suffix_window(&self, k: usize) -> Result<RangeInclusive<usize>>;
}
