use serde::{Deserialize, Serialize};

use super::ProbVector;
use crate::channel::{ChannelMatrix, Output};
use crate::error::{Error, Result};
use crate::scalar::{entropy_bits, neg_xlog2x, Real};

/// Output law of the channel under independent inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputStats<T> {
    /// `gamma_{x1} = p(x1) * sum_{x2 : b = 0} p(x2)`, slot `x1 - 1`.
    pub gamma_by_x1: Vec<T>,
    /// Probability of no erasure.
    pub gamma: T,
    /// Output masses: every good pair with positive mass, then `(E, E)`.
    pub y_distribution: Vec<(Output, T)>,
}

impl<T: Real> OutputStats<T> {
    pub fn y_entropy(&self) -> T {
        entropy_bits(self.y_distribution.iter().map(|(_, p)| *p))
    }

    /// Entropy of the first output component `Y1 ∈ X ∪ {E}`.
    pub fn y1_entropy(&self) -> T {
        entropy_bits(self.gamma_by_x1.iter().copied()) + neg_xlog2x(self.erasure_mass())
    }

    pub fn erasure_mass(&self) -> T {
        self.y_distribution
            .iter()
            .find(|(y, _)| *y == Output::Erasure)
            .map_or(T::zero(), |(_, p)| *p)
    }
}

pub(crate) fn check_dims<T: Real>(b: &ChannelMatrix, p1: &ProbVector<T>, p2: &ProbVector<T>) -> Result<()> {
    let n = b.side() as usize;
    for len in [p1.len(), p2.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    Ok(())
}

/// Enumerates all input pairs and accumulates the output law.
pub fn output_stats<T: Real>(b: &ChannelMatrix, p1: &ProbVector<T>, p2: &ProbVector<T>) -> Result<OutputStats<T>> {
    check_dims(b, p1, p2)?;
    let n = b.side();
    let mut gamma_by_x1 = Vec::with_capacity(n as usize);
    let mut y_distribution = Vec::new();
    let mut erased = T::zero();
    for x1 in 1..=n {
        let q1 = p1.get(x1 as usize);
        let mut good = T::zero();
        for x2 in 1..=n {
            let mass = q1 * p2.get(x2 as usize);
            if b.is_bad(x1, x2) {
                erased = erased + mass;
            } else {
                good = good + p2.get(x2 as usize);
                if mass > T::zero() {
                    y_distribution.push((Output::Pair(x1, x2), mass));
                }
            }
        }
        gamma_by_x1.push(q1 * good);
    }
    let gamma = gamma_by_x1.iter().copied().sum();
    y_distribution.push((Output::Erasure, erased));
    Ok(OutputStats { gamma_by_x1, gamma, y_distribution })
}

/// `I(X1, X2; Y)` in bits. The channel is deterministic, so this is `H(Y)`,
/// evaluated row by row as
/// `sum_x1 [ p(x1 good) * h(p1(x1)) + p1(x1) * sum_{x2 good} h(p2(x2)) ] + h(P(E))`
/// with `h(t) = -t log2 t`.
pub fn sum_rate<T: Real>(b: &ChannelMatrix, p1: &ProbVector<T>, p2: &ProbVector<T>) -> Result<T> {
    check_dims(b, p1, p2)?;
    let n = b.side();
    let mut total = T::zero();
    let mut erased = T::zero();
    let mut delivered = T::zero();
    for x1 in 1..=n {
        let q1 = p1.get(x1 as usize);
        if q1 == T::zero() {
            continue;
        }
        let (mut good, mut bad, mut spread) = (T::zero(), T::zero(), T::zero());
        for x2 in 1..=n {
            let q2 = p2.get(x2 as usize);
            if b.is_bad(x1, x2) {
                bad = bad + q2;
            } else {
                good = good + q2;
                spread = spread + neg_xlog2x(q2);
            }
        }
        total = total + good * neg_xlog2x(q1) + q1 * spread;
        erased = erased + q1 * bad;
        delivered = delivered + q1 * good;
    }
    Ok(total + erasure_term(erased, delivered))
}

/// `h(P(E))`, with the erasure probability renormalized against the delivered
/// mass so that a channel that always erases scores exactly zero.
pub(crate) fn erasure_term<T: Real>(erased: T, delivered: T) -> T {
    let total = erased + delivered;
    if total > T::zero() {
        neg_xlog2x(erased / total)
    } else {
        T::zero()
    }
}

/// The three mutual informations bounding the no-cooperation region at one
/// input pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTriple<T> {
    /// `I(X1; Y | X2) = H(Y1 | X2)`.
    pub i1: T,
    /// `I(X2; Y | X1) = H(Y2 | X1)`.
    pub i2: T,
    /// `I(X1, X2; Y)`.
    pub i12: T,
}

impl<T: Real> RateTriple<T> {
    /// `0 <= i1, i2`, `max(i1, i2) <= i12 <= i1 + i2 + min(i1, i2)`, within `tol`.
    pub fn is_consistent(&self, tol: T) -> bool {
        let (lo, hi) = (self.i1.min(self.i2), self.i1.max(self.i2));
        lo >= -tol && hi <= self.i12 + tol && self.i12 <= self.i1 + self.i2 + lo + tol
    }
}

pub fn rate_triple<T: Real>(b: &ChannelMatrix, p1: &ProbVector<T>, p2: &ProbVector<T>) -> Result<RateTriple<T>> {
    check_dims(b, p1, p2)?;
    let n = b.side();
    // H(Y1 | X2 = x2): Y1 = x1 on good entries of column x2, E otherwise
    let mut i1 = T::zero();
    for x2 in 1..=n {
        let w = p2.get(x2 as usize);
        if w == T::zero() {
            continue;
        }
        let mut erased = T::zero();
        let mut h = T::zero();
        for x1 in 1..=n {
            let q = p1.get(x1 as usize);
            if b.is_bad(x1, x2) {
                erased = erased + q;
            } else {
                h = h + neg_xlog2x(q);
            }
        }
        i1 = i1 + w * (h + neg_xlog2x(erased));
    }
    let mut i2 = T::zero();
    for x1 in 1..=n {
        let w = p1.get(x1 as usize);
        if w == T::zero() {
            continue;
        }
        let mut erased = T::zero();
        let mut h = T::zero();
        for x2 in 1..=n {
            let q = p2.get(x2 as usize);
            if b.is_bad(x1, x2) {
                erased = erased + q;
            } else {
                h = h + neg_xlog2x(q);
            }
        }
        i2 = i2 + w * (h + neg_xlog2x(erased));
    }
    Ok(RateTriple { i1, i2, i12: sum_rate(b, p1, p2)? })
}
