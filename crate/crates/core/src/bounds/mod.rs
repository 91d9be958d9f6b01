//! Closed-form rate bounds, the hull maximum of the no-cooperation outer
//! region and its rasterized oracle, construction failure bounds, and the
//! sum-capacity gap bracket.

mod failure;
mod hyperbola;
mod region;
mod sequences;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use failure::{block_bound_log2, construction_failure_bounds, FailureBounds};
pub use hyperbola::{hull_max_sum, numeric_hull_max, HyperbolaRegion};
pub use region::{cf_inner_region, cf_outer_region, ie_inner_sum, HalfPlane, RateRegion};
pub use sequences::{bound_sequences, ie_outer_sum, ie_outer_sum_asymptotic, BoundSequences};

/// Bracket on `C_CF - C_IE` at cooperation rate `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBounds<T> {
    pub lower: T,
    pub upper: T,
}

/// `lower = (3 - sqrt(5 + 4 eps)) m - delta`, `upper = m + delta`.
pub fn theorem_gap<T: Real>(m: u32, delta: T, epsilon: T) -> Result<GapBounds<T>> {
    let mm = T::count(m as usize);
    if !(delta >= T::zero() && delta <= mm) {
        return Err(Error::Domain(format!("delta = {delta} outside [0, {m}]")));
    }
    if !(epsilon >= T::zero()) {
        return Err(Error::Domain(format!("eps = {epsilon} must be nonnegative")));
    }
    let root = (T::lit(5.0) + T::lit(4.0) * epsilon).sqrt();
    Ok(GapBounds { lower: (T::lit(3.0) - root) * mm - delta, upper: mm + delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn gap_examples() {
        let delta = (10.0 * 10f64.log2()).log2();
        let gap = theorem_gap(10, delta, 0.01).unwrap();
        assert_abs_diff_eq!(gap.lower, (3.0 - 5.04f64.sqrt()) * 10.0 - delta, epsilon = 1e-12);
        assert!((gap.lower - 2.49).abs() < 0.01, "{}", gap.lower);
        assert!((gap.upper - 15.05).abs() < 0.01, "{}", gap.upper);

        let g0 = theorem_gap(100, 0.0, 0.0f64).unwrap();
        assert_abs_diff_eq!(g0.lower / 100.0, 0.763_932_022_500_210_3, epsilon = 1e-12);
        assert!(theorem_gap(4, 5.0, 0.1).is_err());
        assert!(theorem_gap(4, 1.0, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn lower_never_exceeds_upper(m in 1u32..10_000, frac in 0.0f64..=1.0, eps in 0.0f64..10.0) {
            let gap = theorem_gap(m, frac * f64::from(m), eps).unwrap();
            prop_assert!(gap.lower <= gap.upper);
        }
    }
}
