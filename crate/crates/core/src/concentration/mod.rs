//! Martingale tail tools, their Monte Carlo estimators, and the exact
//! last-iterate decomposition.

mod decomposition;
mod martingale;
mod recursive;
mod tail;
mod ytail;

pub use decomposition::{
    alpha_weight, alpha_weight_sum, compute_zt, compute_zt_reordered, decomposition_check, write_decomposition_csv,
    DecompositionReport,
};
pub use martingale::{
    freedman_bound, freedman_event, freedman_event_estimate, freedman_event_estimates, MartingaleFamily,
    MartingaleTrace,
};
pub use recursive::{
    recursive_K, recursive_tail_bound, recursive_tail_estimate, recursive_weighted_tail_bound,
    recursive_weighted_tail_estimate, simulate_recursive, RecursiveProcessSpec,
};
pub use tail::{wilson_interval, write_tail_csv, TailReport, WILSON_Z95};
pub use ytail::{ytail_check, ytail_weighted_check, ytail_values};
