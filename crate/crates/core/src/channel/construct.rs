use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    estimate_bad_density_with, has_block_property, Channel, ChannelMatrix, ConstructionParams,
    DensityOptions, MemoryCap, SubmatrixShape,
};
use crate::bounds::block_bound_log2;
use crate::error::{Error, Result};

/// Draws every entry i.i.d. Bernoulli(`p`) from a ChaCha stream seeded by `seed`.
pub fn sample_matrix(m: u32, p: f64, seed: u64, cap: MemoryCap) -> Result<ChannelMatrix> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    cap.check(m)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ChannelMatrix::zeros(m);
    for idx in 0..out.num_entries() {
        if rng.gen_bool(p) {
            out.set_bit(idx, true);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstructOptions {
    pub max_attempts: u32,
    /// Number of random submatrices in the attached density report.
    pub density_trials: usize,
    pub density_shape: SubmatrixShape,
    pub cap: MemoryCap,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self {
            max_attempts: 100,
            density_trials: 200,
            density_shape: SubmatrixShape::Square,
            cap: MemoryCap::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Constructed {
    pub channel: Channel,
    /// 1-based index of the accepted draw; the matrix came from seed `params.seed + attempts - 1`.
    pub attempts: u32,
}

/// Rejection sampling: draws matrices with seeds `seed, seed + 1, ...` until one
/// has the block property.
pub fn construct_channel(params: &ConstructionParams, max_attempts: u32) -> Result<Constructed> {
    construct_channel_with(params, &ConstructOptions { max_attempts, ..Default::default() })
}

pub fn construct_channel_with(
    params: &ConstructionParams,
    opts: &ConstructOptions,
) -> Result<Constructed> {
    params.validate()?;
    opts.cap.check(params.m)?;
    for attempt in 0..opts.max_attempts {
        let seed = params.seed.wrapping_add(u64::from(attempt));
        let matrix = sample_matrix(params.m, params.p, seed, opts.cap)?;
        if !has_block_property(&matrix, params.g_of_m)? {
            continue;
        }
        let density = if opts.density_trials > 0 {
            let f = usize::try_from(params.f_of_m).expect("f bounded by 2^m");
            Some(estimate_bad_density_with(
                &matrix,
                f,
                params.epsilon,
                DensityOptions {
                    trials: opts.density_trials,
                    seed: seed ^ 0x9E37_79B9_7F4A_7C15,
                    shape: opts.density_shape,
                },
            )?)
        } else {
            None
        };
        let mut channel = Channel::unverified(matrix, params.clone())?;
        channel.block_property_verified = true;
        channel.density_report = density;
        return Ok(Constructed { channel, attempts: attempt + 1 });
    }
    Err(Error::Exhausted {
        attempts: opts.max_attempts,
        block_bound_log2: block_bound_log2(params.m, params.g_of_m, params.p),
    })
}
