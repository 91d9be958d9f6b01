//! Erasure-structured multiple-access channels defined by a binary matrix.
//!
//! Input alphabets are `{1, ..., 2^m}` for both users. The pair `(x1, x2)` is
//! delivered intact when `b_{x1 x2} = 0` and erased to `(E, E)` otherwise.
//! Two combinatorial properties make these channels interesting:
//!
//! * every large enough submatrix is mostly bad ([`estimate_bad_density`]), and
//! * every row and column, cut into consecutive blocks of `2^g` entries, has a
//!   good entry in each block ([`check_block_goodness`]).

mod construct;
mod format;
mod matrix;
mod property;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use construct::{
    construct_channel, construct_channel_with, sample_matrix, ConstructOptions, Constructed,
};
pub use format::{
    deserialize_channel, deserialize_channel_capped, read_channel_file, serialize_channel,
    write_channel_file, Encoding,
};
pub use matrix::{ChannelMatrix, Output, MAX_SUPPORTED_M};
pub use property::{
    check_block_goodness, estimate_bad_density, estimate_bad_density_with, has_block_property,
    Axis, BlockFailure, BlockReport, DensityOptions, DensityReport, SubmatrixShape,
};

/// Default upper bound on `m` for anything that allocates a matrix.
pub const DEFAULT_MAX_M: u32 = 14;

/// Upper bound on the alphabet exponent accepted from untrusted input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryCap {
    pub max_m: u32,
}

impl Default for MemoryCap {
    fn default() -> Self {
        Self { max_m: DEFAULT_MAX_M }
    }
}

impl MemoryCap {
    pub fn new(max_m: u32) -> Self {
        Self { max_m: max_m.min(MAX_SUPPORTED_M) }
    }

    pub fn check(&self, m: u32) -> Result<()> {
        if m > self.max_m {
            Err(Error::ResourceLimit { m, max_m: self.max_m })
        } else {
            Ok(())
        }
    }
}

/// `ceil(log2 n)` for `n >= 1`.
fn ceil_log2(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        u32::BITS - (n - 1).leading_zeros()
    }
}

/// Default block exponent: `2 ceil(log2 m)` clamped to `[1, m]`.
pub fn default_g(m: u32) -> u32 {
    (2 * ceil_log2(m)).clamp(1, m.max(1))
}

/// Default submatrix threshold: `m^2`, clamped to the alphabet size for tiny `m`.
pub fn default_f(m: u32) -> u64 {
    let sq = u64::from(m) * u64::from(m);
    if m < 64 {
        sq.min(1u64 << m)
    } else {
        sq
    }
}

/// Default Bernoulli parameter `1 - eps/2`.
pub fn default_p(epsilon: f64) -> f64 {
    1.0 - epsilon / 2.0
}

/// Parameters of the random construction that produced (or will produce) a matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub m: u32,
    pub p: f64,
    pub epsilon: f64,
    pub f_of_m: u64,
    pub g_of_m: u32,
    pub seed: u64,
}

impl ConstructionParams {
    /// Default schedule for `f`, `g` and `p` at the given `m` and `epsilon`.
    pub fn with_defaults(m: u32, epsilon: f64, seed: u64) -> Self {
        Self {
            m,
            p: default_p(epsilon),
            epsilon,
            f_of_m: default_f(m),
            g_of_m: default_g(m),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} outside [0, 1]", self.p));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("eps = {} outside (0, 1)", self.epsilon));
        }
        if self.g_of_m == 0 || self.g_of_m > self.m {
            return bad(format!("g = {} outside 1..={}", self.g_of_m, self.m));
        }
        let side = if self.m < 64 { 1u64 << self.m } else { u64::MAX };
        if self.f_of_m == 0 || self.f_of_m > side {
            return bad(format!("f = {} outside 1..=2^{}", self.f_of_m, self.m));
        }
        Ok(())
    }

    /// Whether `1 - eps < p < 1`, the range in which the random construction is
    /// guaranteed to work for large `m`.
    pub fn in_guarantee_interval(&self) -> bool {
        1.0 - self.epsilon < self.p && self.p < 1.0
    }

    pub fn block_len(&self) -> usize {
        1usize << self.g_of_m
    }
}

/// A channel matrix together with the parameters it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub matrix: ChannelMatrix,
    pub params: ConstructionParams,
    block_property_verified: bool,
    pub density_report: Option<DensityReport>,
}

impl Channel {
    /// Pairs a matrix with its parameters without checking the block property.
    pub fn unverified(matrix: ChannelMatrix, params: ConstructionParams) -> Result<Self> {
        params.validate()?;
        if matrix.m() != params.m {
            return Err(Error::InvalidParams(format!(
                "matrix has m = {} but parameters say m = {}",
                matrix.m(),
                params.m
            )));
        }
        Ok(Self { matrix, params, block_property_verified: false, density_report: None })
    }

    /// Pairs a matrix with its parameters and requires the block property to hold.
    pub fn verified(matrix: ChannelMatrix, params: ConstructionParams) -> Result<Self> {
        let mut ch = Self::unverified(matrix, params)?;
        let report = ch.verify_blocks();
        if !report.passed() {
            return Err(Error::Invariant(format!(
                "block property fails at g = {} ({} blocks without a good entry)",
                report.g,
                report.failures.len()
            )));
        }
        Ok(ch)
    }

    /// Runs the exhaustive block check and records the outcome.
    pub fn verify_blocks(&mut self) -> BlockReport {
        let report = check_block_goodness(&self.matrix, self.params.g_of_m)
            .expect("validated parameters keep g within 1..=m");
        self.block_property_verified = report.passed();
        report
    }

    pub fn block_property_verified(&self) -> bool {
        self.block_property_verified
    }

    pub fn m(&self) -> u32 {
        self.matrix.m()
    }

    pub fn g(&self) -> u32 {
        self.params.g_of_m
    }

    pub fn apply(&self, x1: u32, x2: u32) -> Result<Output> {
        self.matrix.apply(x1, x2)
    }
}

impl AsRef<ChannelMatrix> for Channel {
    fn as_ref(&self) -> &ChannelMatrix {
        &self.matrix
    }
}

impl AsRef<ChannelMatrix> for ChannelMatrix {
    fn as_ref(&self) -> &ChannelMatrix {
        self
    }
}
