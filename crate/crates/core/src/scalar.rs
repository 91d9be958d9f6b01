//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used by the information-theoretic and geometric code: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lift an `f64` constant into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    /// Lift a count into the scalar type.
    #[inline]
    fn count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("representable count")
    }

    /// Tolerance used when checking that a probability vector sums to one.
    #[inline]
    fn sum_tolerance() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

/// `-x log2 x` with the convention `0 log 0 = 0`.
#[inline]
pub fn neg_xlog2x<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy in bits of a nonnegative mass sequence.
pub fn entropy_bits<T: Real, I: IntoIterator<Item = T>>(masses: I) -> T {
    masses.into_iter().map(neg_xlog2x).sum()
}

/// Binary entropy in bits.
#[inline]
pub fn binary_entropy<T: Real>(q: T) -> T {
    neg_xlog2x(q) + neg_xlog2x(T::one() - q)
}
