//! Two-user multiple-access channels whose matrix of good and bad input pairs
//! separates facilitator-assisted transmission from independent encoding.
//!
//! * [`channel`] builds, checks and stores the bit-matrix channels.
//! * [`coding`] holds the blocklength-one zero-error codes.
//! * [`capacity`] evaluates and maximizes the sum rate over independent inputs.
//! * [`bounds`] evaluates the closed-form rate regions and bounds.
//! * [`experiments`] runs parameter sweeps and writes tables.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod capacity;
pub mod channel;
pub mod coding;
pub mod error;
pub mod experiments;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ProbVector64 = capacity::ProbVector<f64>;
pub type ProbVector32 = capacity::ProbVector<f32>;
pub type RateTriple64 = capacity::RateTriple<f64>;
pub type UniformDecomposition64 = capacity::UniformDecomposition<f64>;
pub type CapacityEstimate64 = capacity::CapacityEstimate<f64>;
pub type OptimizerConfig64 = capacity::OptimizerConfig<f64>;
pub type RateRegion64 = bounds::RateRegion<f64>;
pub type RateRegion32 = bounds::RateRegion<f32>;
pub type HyperbolaRegion64 = bounds::HyperbolaRegion<f64>;
pub type BoundSequences64 = bounds::BoundSequences<f64>;
pub type GapBounds64 = bounds::GapBounds<f64>;
