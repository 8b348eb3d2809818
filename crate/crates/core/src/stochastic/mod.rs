//! Bounded, symmetric noise models and the noisy quadratic used by the
//! high-probability experiments.

mod lbdelta;
mod noise;
mod quadratic;

pub use lbdelta::{lbdelta_closed_form, read_signs, running_means, suffix_A, suffix_average_identity, SuffixNoiseSpec};
pub use noise::NoiseModel;
pub use quadratic::{quadratic_oracle, QuadraticInstance, QuadraticOracle};
