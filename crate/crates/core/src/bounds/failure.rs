use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

/// Enumerate the union-bound double sum when it has at most this many terms.
const MAX_ENUMERATED_TERMS: f64 = 4.0e6;

/// Union bounds on the probability that a Bernoulli(`p`) matrix misses one of
/// the two properties, as base-2 logarithms (values above 0 are vacuous).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureBounds {
    /// Some large submatrix has bad fraction at most `1 - eps` (Hoeffding + union bound).
    pub density_log2: f64,
    /// Some row or column block has no good entry.
    pub block_log2: f64,
    /// Whether `density_log2` came from the closed-form over-estimate instead of the double sum.
    pub density_closed_form: bool,
}

impl FailureBounds {
    pub fn block(&self) -> f64 {
        self.block_log2.exp2()
    }

    pub fn density(&self) -> f64 {
        self.density_log2.exp2()
    }
}

/// `log2( 2^(2m - g + 1) p^(2^g) )`.
pub fn block_bound_log2(m: u32, g: u32, p: f64) -> f64 {
    let blocks = f64::from(2 * m) - f64::from(g) + 1.0;
    let per_block = (g as f64).exp2();
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    blocks + per_block * p.log2()
}

/// Natural-log terms `(i + j) m ln 2 - 2 (p - 1 + eps)^2 i j` summed over
/// `f <= i, j <= 2^m`, or the closed form `2m(1 + f) ln 2 - 2 (p - 1 + eps)^2 f^2`
/// when the sum is too large to enumerate.
fn density_bound_log2(m: u32, p: f64, f: u64, epsilon: f64) -> (f64, bool) {
    let margin = p - 1.0 + epsilon;
    let rate = 2.0 * margin * margin;
    let mf = f64::from(m);
    let f_ = f as f64;
    let side = f64::from(m).exp2();
    let span = side - f_ + 1.0;
    if span <= 0.0 {
        return (f64::NEG_INFINITY, false);
    }
    if span * span > MAX_ENUMERATED_TERMS {
        let ln = 2.0 * mf * (1.0 + f_) * LN_2 - rate * f_ * f_;
        return (ln / LN_2, true);
    }
    let hi = side as u64;
    let exponent = |i: u64, j: u64| (i + j) as f64 * mf * LN_2 - rate * i as f64 * j as f64;
    // the term is largest at a corner of the square, so use that as the log-sum-exp shift
    let shift = [exponent(f, f), exponent(f, hi), exponent(hi, hi)]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut acc = 0.0;
    for i in f..=hi {
        for j in f..=hi {
            acc += (exponent(i, j) - shift).exp();
        }
    }
    ((shift + acc.ln()) / LN_2, false)
}

pub fn construction_failure_bounds(m: u32, p: f64, f_of_m: u64, g_of_m: u32, epsilon: f64) -> FailureBounds {
    let (density_log2, density_closed_form) = density_bound_log2(m, p, f_of_m, epsilon);
    FailureBounds { density_log2, block_log2: block_bound_log2(m, g_of_m, p), density_closed_form }
}
