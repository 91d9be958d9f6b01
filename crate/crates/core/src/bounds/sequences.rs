use serde::{Deserialize, Serialize};

use super::hyperbola::{hull_max_sum, HyperbolaRegion};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Constants of the normalized no-cooperation outer region at a finite `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSequences<T> {
    pub m: u32,
    pub k_m: T,
    pub a_m: T,
    pub b_m: T,
    pub c_m: T,
}

impl<T: Real> BoundSequences<T> {
    pub fn region(&self) -> HyperbolaRegion<T> {
        HyperbolaRegion::new(self.a_m, self.b_m, self.c_m)
    }
}

/// `K_m = (1 - log2 f / m)^-1` and the derived `a_m`, `b_m`, `c_m`.
pub fn bound_sequences<T: Real>(m: u32, epsilon: T, f_of_m: u64) -> Result<BoundSequences<T>> {
    if m == 0 || f_of_m == 0 {
        return Err(Error::Domain("m and f must be positive".into()));
    }
    let mm = T::count(m as usize);
    let log_f = T::lit(f_of_m as f64).log2();
    if !(log_f < mm) {
        return Err(Error::Domain(format!("log2 f = {log_f} is not below m = {m}; K_m is undefined")));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let k_m = one / (one - log_f / mm);
    let inv_k = one / k_m;
    let inv_m = one / mm;
    let a_m = one + inv_m - inv_k;
    let b_m = -one - inv_m + inv_k + inv_k * inv_k;
    let c_m = -one - two * inv_m - inv_m * inv_m
        + (two + two * inv_m) * inv_k
        + (epsilon + inv_m) * inv_k * inv_k
        - a_m * b_m;
    Ok(BoundSequences { m, k_m, a_m, b_m, c_m })
}

/// Finite-`m` outer value for the no-cooperation sum-capacity:
/// `m` times the hull maximum of the region built from `a_m, b_m, c_m`.
/// Only an upper bound for all but finitely many `m`; errors when the closed
/// form's hypotheses fail at this `m`.
pub fn ie_outer_sum<T: Real>(m: u32, epsilon: T, f_of_m: u64) -> Result<T> {
    let seq = bound_sequences(m, epsilon, f_of_m)?;
    Ok(T::count(m as usize) * hull_max_sum(&seq.region())?)
}

/// Limit form `(sqrt(5 + 4 eps) - 1) m`.
pub fn ie_outer_sum_asymptotic<T: Real>(m: u32, epsilon: T) -> T {
    ((T::lit(5.0) + T::lit(4.0) * epsilon).sqrt() - T::one()) * T::count(m as usize)
}
