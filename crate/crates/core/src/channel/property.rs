use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ChannelMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Row,
    Column,
}

/// A block of `2^g` consecutive entries, in row or column `index` (1-based),
/// that contains no good entry. `block` is the 0-based block number `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockFailure {
    pub axis: Axis,
    pub index: u32,
    pub block: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub g: u32,
    pub failures: Vec<BlockFailure>,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_g(b: &ChannelMatrix, g: u32) -> Result<()> {
    if g == 0 || g > b.m() {
        return Err(Error::Domain(format!("g = {g} outside 1..={}", b.m())));
    }
    Ok(())
}

/// Visits every all-bad block; stops early when `visit` returns false.
fn scan_blocks(b: &ChannelMatrix, g: u32, mut visit: impl FnMut(BlockFailure) -> bool) {
    let side = b.side() as usize;
    let len = 1usize << g;
    let blocks = side >> g;
    let transposed = b.transpose();
    for (axis, mat) in [(Axis::Row, b), (Axis::Column, &transposed)] {
        for x in 0..side {
            for k in 0..blocks {
                if mat.row_segment_all_bad(x, k * len, len)
                    && !visit(BlockFailure { axis, index: x as u32 + 1, block: k as u32 })
                {
                    return;
                }
            }
        }
    }
}

/// Exhaustive check that every row block `B(x, X_k)` and column block
/// `B(X_k, x)` contains a good entry, with `X_k = {k 2^g + l : l = 1..2^g}`.
pub fn check_block_goodness(b: &ChannelMatrix, g: u32) -> Result<BlockReport> {
    check_g(b, g)?;
    let mut failures = Vec::new();
    scan_blocks(b, g, |f| {
        failures.push(f);
        true
    });
    Ok(BlockReport { g, failures })
}

/// Short-circuiting form of [`check_block_goodness`].
pub fn has_block_property(b: &ChannelMatrix, g: u32) -> Result<bool> {
    check_g(b, g)?;
    let mut ok = true;
    scan_blocks(b, g, |_| {
        ok = false;
        false
    });
    Ok(ok)
}

/// Statistical evidence that large submatrices are mostly bad.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub trials: usize,
    pub violations: usize,
    pub min_bad_fraction_observed: f64,
    pub submatrix_size_used: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SubmatrixShape {
    /// `|S| = |T| = f`.
    #[default]
    Square,
    /// `|S|` and `|T|` drawn independently and uniformly from `f..=min(2f, 2^m)`.
    Rectangular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensityOptions {
    pub trials: usize,
    pub seed: u64,
    pub shape: SubmatrixShape,
}

/// Samples `trials` random `f x f` submatrices and counts those whose bad
/// fraction is at most `1 - epsilon`.
pub fn estimate_bad_density(
    b: &ChannelMatrix,
    f: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<DensityReport> {
    estimate_bad_density_with(b, f, epsilon, DensityOptions { trials, seed, shape: SubmatrixShape::Square })
}

pub fn estimate_bad_density_with(
    b: &ChannelMatrix,
    f: usize,
    epsilon: f64,
    opts: DensityOptions,
) -> Result<DensityReport> {
    let side = b.side() as usize;
    if f == 0 || f > side {
        return Err(Error::Domain(format!("submatrix size {f} outside 1..={side}")));
    }
    if opts.trials == 0 {
        return Err(Error::Domain("at least one density trial is required".into()));
    }
    let threshold = 1.0 - epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut violations = 0;
    let mut min_frac = 1.0f64;
    for _ in 0..opts.trials {
        let (s, t) = match opts.shape {
            SubmatrixShape::Square => (f, f),
            SubmatrixShape::Rectangular => {
                let hi = (2 * f).min(side);
                (rng.gen_range(f..=hi), rng.gen_range(f..=hi))
            }
        };
        let rows = index::sample(&mut rng, side, s);
        let cols = index::sample(&mut rng, side, t);
        let mut bad = 0usize;
        for r in rows.iter() {
            let base = r * side;
            bad += cols.iter().filter(|&c| b.bit(base + c)).count();
        }
        let frac = bad as f64 / (s * t) as f64;
        min_frac = min_frac.min(frac);
        if frac <= threshold {
            violations += 1;
        }
    }
    Ok(DensityReport {
        trials: opts.trials,
        violations,
        min_bad_fraction_observed: min_frac,
        submatrix_size_used: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn checkerboard() -> ChannelMatrix {
        ChannelMatrix::from_fn(2, |i, j| (i + j) % 2 == 1)
    }

    #[test]
    fn block_check_examples() {
        assert!(check_block_goodness(&ChannelMatrix::zeros(2), 1).unwrap().passed());
        assert!(check_block_goodness(&checkerboard(), 1).unwrap().passed());

        let all_bad = check_block_goodness(&ChannelMatrix::ones(2), 1).unwrap();
        let rows = all_bad.failures.iter().filter(|f| f.axis == Axis::Row).count();
        let cols = all_bad.failures.iter().filter(|f| f.axis == Axis::Column).count();
        // 4 rows x 2 blocks, and the same for columns
        assert_eq!((rows, cols), (8, 8));
        assert!(!has_block_property(&ChannelMatrix::ones(2), 1).unwrap());

        assert!(check_block_goodness(&checkerboard(), 0).is_err());
        assert!(check_block_goodness(&checkerboard(), 3).is_err());
    }

    #[test]
    fn failures_are_located() {
        let mut b = ChannelMatrix::zeros(3);
        // row 6, columns 5..8 form block k = 1 at g = 2
        for j in 5..=8 {
            b.set(6, j, true);
        }
        let report = check_block_goodness(&b, 2).unwrap();
        assert_eq!(report.failures, vec![BlockFailure { axis: Axis::Row, index: 6, block: 1 }]);
        let bt = b.transpose();
        let report = check_block_goodness(&bt, 2).unwrap();
        assert_eq!(report.failures, vec![BlockFailure { axis: Axis::Column, index: 6, block: 1 }]);
        // g = 1 sees two failing halves of that block
        assert_eq!(check_block_goodness(&b, 1).unwrap().failures.len(), 2);
        assert!(check_block_goodness(&b, 3).unwrap().passed());
    }

    /// Direct transcription of the property, one entry at a time.
    fn block_oracle(b: &ChannelMatrix, g: u32) -> usize {
        let side = b.side();
        let len = 1u32 << g;
        let mut fails = 0;
        for x in 1..=side {
            for k in 0..side / len {
                let blk = (1..=len).map(|l| k * len + l);
                if blk.clone().all(|y| b.is_bad(x, y)) {
                    fails += 1;
                }
                if blk.clone().all(|y| b.is_bad(y, x)) {
                    fails += 1;
                }
            }
        }
        fails
    }

    proptest! {
        #[test]
        fn block_property_is_monotone_in_g(m in 1u32..=5, seed in any::<u64>(), p in 0.5f64..1.0) {
            let b = super::super::sample_matrix(m, p, seed, Default::default()).unwrap();
            let mut passed_before = false;
            for g in 1..=m {
                let r = check_block_goodness(&b, g).unwrap();
                prop_assert_eq!(r.failures.len(), block_oracle(&b, g));
                prop_assert_eq!(r.passed(), has_block_property(&b, g).unwrap());
                if passed_before {
                    prop_assert!(r.passed());
                }
                passed_before = r.passed();
            }
        }
    }

    #[test]
    fn density_examples() {
        let ones = ChannelMatrix::ones(4);
        let r = estimate_bad_density(&ones, 5, 0.1, 100, 1).unwrap();
        assert_eq!((r.violations, r.min_bad_fraction_observed), (0, 1.0));
        let zeros = ChannelMatrix::zeros(4);
        let r = estimate_bad_density(&zeros, 5, 0.1, 100, 1).unwrap();
        assert_eq!((r.violations, r.min_bad_fraction_observed), (100, 0.0));
        assert_eq!(r.submatrix_size_used, 5);
        assert!(estimate_bad_density(&zeros, 17, 0.1, 10, 1).is_err());
        assert!(estimate_bad_density(&zeros, 0, 0.1, 10, 1).is_err());
    }

    #[test]
    fn rectangular_sampling_is_reproducible() {
        let b = super::super::sample_matrix(6, 0.9, 11, Default::default()).unwrap();
        let opts = DensityOptions { trials: 50, seed: 5, shape: SubmatrixShape::Rectangular };
        let r1 = estimate_bad_density_with(&b, 10, 0.2, opts).unwrap();
        let r2 = estimate_bad_density_with(&b, 10, 0.2, opts).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.violations <= r1.trials);
        assert!((0.0..=1.0).contains(&r1.min_bad_fraction_observed));
    }
}
