use serde::{Deserialize, Serialize};

use super::ProbVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A pmf written as a convex combination of uniform laws on nested supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformDecomposition<T> {
    /// Positive weights `alpha_j`, summing to one.
    pub weights: Vec<T>,
    /// 1-based symbols of each support, ascending; `supports[j + 1]` is a strict subset of `supports[j]`.
    pub supports: Vec<Vec<u32>>,
}

impl<T: Real> UniformDecomposition<T> {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// `sum_j alpha_j 1{x in S_j} / |S_j|` over an alphabet of size `n`.
    pub fn reconstruct(&self, n: usize) -> Vec<T> {
        let mut p = vec![T::zero(); n];
        for (&alpha, support) in self.weights.iter().zip(&self.supports) {
            let share = alpha / T::count(support.len());
            for &x in support {
                p[x as usize - 1] = p[x as usize - 1] + share;
            }
        }
        p
    }

    /// Total weight of the uniform components whose support has at most `threshold` symbols.
    pub fn small_support_mass(&self, threshold: T) -> T {
        self.weights
            .iter()
            .zip(&self.supports)
            .filter(|(_, s)| T::count(s.len()) <= threshold)
            .map(|(&w, _)| w)
            .sum()
    }

    pub fn is_strictly_nested(&self) -> bool {
        self.supports.windows(2).all(|w| {
            w[1].len() < w[0].len() && w[1].iter().all(|x| w[0].binary_search(x).is_ok())
        })
    }
}

/// Level-set decomposition: with distinct positive masses `v_1 < ... < v_k`,
/// `S_j = {x : p(x) >= v_j}`, `alpha_1 = |S_1| v_1` and
/// `alpha_j = |S_j| (v_j - v_{j-1})`.
pub fn decompose_into_uniforms<T: Real>(p: &ProbVector<T>) -> UniformDecomposition<T> {
    let mut order: Vec<usize> = (0..p.len()).filter(|&i| p.as_slice()[i] > T::zero()).collect();
    order.sort_by(|&a, &b| p.as_slice()[b].partial_cmp(&p.as_slice()[a]).unwrap().then(a.cmp(&b)));
    // order is by mass descending; S_j is a prefix of it
    let mut levels: Vec<(T, usize)> = Vec::new();
    for (rank, &i) in order.iter().enumerate() {
        let v = p.as_slice()[i];
        match levels.last_mut() {
            Some((last, len)) if *last == v => *len = rank + 1,
            _ => levels.push((v, rank + 1)),
        }
    }
    levels.reverse();
    let mut weights = Vec::with_capacity(levels.len());
    let mut supports = Vec::with_capacity(levels.len());
    let mut prev = T::zero();
    for &(v, len) in &levels {
        weights.push(T::count(len) * (v - prev));
        prev = v;
        let mut s: Vec<u32> = order[..len].iter().map(|&i| i as u32 + 1).collect();
        s.sort_unstable();
        supports.push(s);
    }
    UniformDecomposition { weights, supports }
}

/// `K (1 - (H - 1) / log2 |X|)` with `K = (1 - log2 threshold / log2 |X|)^-1`, for a real threshold.
pub fn entropy_mass_bound<T: Real>(entropy_bits: T, alphabet_size: usize, threshold: T) -> Result<T> {
    if alphabet_size < 2 {
        return Err(Error::Domain(format!("alphabet size {alphabet_size} must be at least 2")));
    }
    let n = T::count(alphabet_size);
    if !(threshold > T::zero() && threshold < n) {
        return Err(Error::Domain(format!("subset size {threshold} outside (0, {alphabet_size})")));
    }
    let log_n = n.log2();
    let slack = T::sum_tolerance() * log_n.max(T::one());
    if !(entropy_bits >= -slack && entropy_bits <= log_n + slack) {
        return Err(Error::Domain(format!("entropy {entropy_bits} outside [0, log2 {alphabet_size}]")));
    }
    let k = T::one() / (T::one() - threshold.log2() / log_n);
    Ok(k * (T::one() - (entropy_bits - T::one()) / log_n))
}

/// Upper bound on the mass any `subset_size` symbols can carry under a law
/// with the given entropy. May exceed one.
pub fn tail_mass_bound<T: Real>(entropy_bits: T, alphabet_size: usize, subset_size: usize) -> Result<T> {
    if subset_size == 0 || subset_size >= alphabet_size {
        return Err(Error::Domain(format!("subset size {subset_size} outside 1..{alphabet_size}")));
    }
    entropy_mass_bound(entropy_bits, alphabet_size, T::count(subset_size))
}
