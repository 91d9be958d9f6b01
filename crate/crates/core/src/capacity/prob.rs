use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{entropy_bits, Real};

/// Probability mass function over `{1, ..., N}`. Zero entries are kept so that
/// indices stay aligned with the channel alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbVector<T> {
    probs: Vec<T>,
}

impl<T: Real> ProbVector<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= T::zero())) {
            return Err(Error::Domain(format!("entry {} = {p} is not a probability", i + 1)));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::sum_tolerance() {
            return Err(Error::Domain(format!("entries sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Scales nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero() && total.is_finite()) || weights.iter().any(|w| *w < T::zero()) {
            return Err(Error::Domain("weights must be nonnegative with a positive finite sum".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs a nonempty alphabet");
        Self { probs: vec![T::one() / T::count(n); n] }
    }

    /// All mass on the 1-based symbol `x`.
    pub fn point_mass(n: usize, x: usize) -> Self {
        assert!((1..=n).contains(&x), "symbol {x} outside 1..={n}");
        let mut probs = vec![T::zero(); n];
        probs[x - 1] = T::one();
        Self { probs }
    }

    /// Uniform draw from the simplex (flat Dirichlet).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let weights: Vec<T> = (0..n)
            .map(|_| T::lit(-(1.0 - rng.gen::<f64>()).ln()))
            .collect();
        Self::normalized(weights).expect("exponential weights are positive")
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of the 1-based symbol `x`.
    pub fn get(&self, x: usize) -> T {
        self.probs[x - 1]
    }

    /// Masses in symbol order (slot 0 is symbol 1).
    pub fn as_slice(&self) -> &[T] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<T> {
        self.probs
    }

    pub fn entropy(&self) -> T {
        entropy_bits(self.probs.iter().copied())
    }

    pub(crate) fn from_raw(probs: Vec<T>) -> Self {
        Self { probs }
    }
}
