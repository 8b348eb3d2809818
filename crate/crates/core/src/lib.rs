//! Projected stochastic subgradient descent with the tools to probe its
//! final-iterate behaviour: adversarial piecewise-linear instances with
//! closed-form iterates, bounded-noise oracles, martingale tail estimators,
//! and an exact last-iterate decomposition check.
//!
//! Indices in the public API are 1-based throughout.

pub mod concentration;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod export;
pub mod replicas;
pub mod rng;
pub mod schedule;
pub mod sgd;
pub mod stochastic;
pub mod vector;

pub use domain::{project, Domain};
pub use error::{LabError, Result};
pub use schedule::{schedule_value, StepSchedule};
pub use sgd::{
    drive, sgd_run, sgd_run_with, suffix_average, uniform_average, Finish, Oracle, OracleResponse, Query,
    Record, RunTrace, Step,
};
pub use vector::Vector;
