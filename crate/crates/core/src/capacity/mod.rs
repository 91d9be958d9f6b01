//! Output statistics, sum-rate evaluation and maximization over independent
//! input laws, and the entropy/tail-mass tools used by the outer bound.

mod brute;
mod decompose;
mod optimize;
mod prob;
mod stats;

pub use brute::{brute_force_sum_capacity, BruteForce};
pub use decompose::{decompose_into_uniforms, entropy_mass_bound, tail_mass_bound, UniformDecomposition};
pub use optimize::{
    alternating_maximization, estimate_sum_capacity, AltOptions, AltResult, CapacityEstimate, OptimizerConfig,
};
pub use prob::ProbVector;
pub use stats::{output_stats, rate_triple, sum_rate, OutputStats, RateTriple};
