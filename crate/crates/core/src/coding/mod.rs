//! Blocklength-one codes: the facilitator-assisted code that reaches the
//! corner points `(m, m - g)` and `(m - g, m)`, the single-user codes that
//! reach `(m - g, 0)` and `(0, m - g)` without cooperation, and exhaustive or
//! sampled error measurement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelMatrix, Output};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// Encoder 1 sends at rate `m`, encoder 2 at `m - g`.
    R1Full,
    /// Encoder 2 sends at rate `m`, encoder 1 at `m - g`.
    R2Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    User1,
    User2,
}

/// A blocklength-one code for the two-user channel. Messages are 1-based.
pub trait BlockCode {
    fn matrix(&self) -> &ChannelMatrix;

    /// `(|W1|, |W2|)`.
    fn message_sizes(&self) -> (u64, u64);

    fn encode(&self, w1: u64, w2: u64) -> Result<(u32, u32)>;

    /// `None` when the output carries no decision (erasure or unknown codeword).
    fn decode(&self, y: Output) -> Option<(u64, u64)>;

    /// `log2 |W1| + log2 |W2|` bits per channel use.
    fn sum_rate(&self) -> f64 {
        let (a, b) = self.message_sizes();
        (a as f64).log2() + (b as f64).log2()
    }
}

fn check_message(w: u64, size: u64, who: &str) -> Result<()> {
    if (1..=size).contains(&w) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{who} message {w} outside 1..={size}")))
    }
}

/// Facilitator-assisted code. The facilitator sees both messages and tells the
/// reduced-rate encoder which entry of its block is good.
#[derive(Clone, Copy, Debug)]
pub struct CfCode<'a> {
    channel: &'a Channel,
    g: u32,
    orientation: Orientation,
}

impl<'a> CfCode<'a> {
    pub fn new(channel: &'a Channel, orientation: Orientation) -> Result<Self> {
        if !channel.block_property_verified() {
            return Err(Error::Invariant("facilitator code needs a channel with the block property verified".into()));
        }
        Ok(Self { channel, g: channel.g(), orientation })
    }

    pub fn channel(&self) -> &'a Channel {
        self.channel
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn block(&self) -> u32 {
        1 << self.g
    }

    fn check_messages(&self, w1: u64, w2: u64) -> Result<()> {
        let (s1, s2) = self.message_sizes();
        check_message(w1, s1, "first")?;
        check_message(w2, s2, "second")
    }

    /// Smallest `z` in `1..=2^g` that lands the reduced-rate encoder on a good entry.
    pub fn facilitator_output(&self, w1: u64, w2: u64) -> Result<u32> {
        self.check_messages(w1, w2)?;
        let b = &self.channel.matrix;
        let block = self.block();
        let found = match self.orientation {
            Orientation::R1Full => {
                let base = (w2 as u32 - 1) * block;
                (1..=block).find(|&z| b.is_good(w1 as u32, base + z))
            }
            Orientation::R2Full => {
                let base = (w1 as u32 - 1) * block;
                (1..=block).find(|&z| b.is_good(base + z, w2 as u32))
            }
        };
        found.ok_or_else(|| Error::Invariant(format!("no good entry in the block for messages ({w1}, {w2})")))
    }

    /// Channel inputs for a given facilitator output. The full-rate encoder
    /// ignores `z`.
    pub fn encode_with(&self, w1: u64, w2: u64, z: u32) -> Result<(u32, u32)> {
        self.check_messages(w1, w2)?;
        if !(1..=self.block()).contains(&z) {
            return Err(Error::Domain(format!("facilitator output {z} outside 1..={}", self.block())));
        }
        let block = self.block();
        Ok(match self.orientation {
            Orientation::R1Full => (w1 as u32, (w2 as u32 - 1) * block + z),
            Orientation::R2Full => ((w1 as u32 - 1) * block + z, w2 as u32),
        })
    }

    pub fn cf_encode(&self, w1: u64, w2: u64) -> Result<(u32, u32)> {
        let z = self.facilitator_output(w1, w2)?;
        self.encode_with(w1, w2, z)
    }

    pub fn cf_decode(&self, y: Output) -> Option<(u64, u64)> {
        let Output::Pair(x1, x2) = y else { return None };
        let block = self.block();
        Some(match self.orientation {
            Orientation::R1Full => (u64::from(x1), u64::from(x2.div_ceil(block))),
            Orientation::R2Full => (u64::from(x1.div_ceil(block)), u64::from(x2)),
        })
    }
}

impl BlockCode for CfCode<'_> {
    fn matrix(&self) -> &ChannelMatrix {
        &self.channel.matrix
    }

    fn message_sizes(&self) -> (u64, u64) {
        let m = self.channel.m();
        let (full, reduced) = (1u64 << m, 1u64 << (m - self.g));
        match self.orientation {
            Orientation::R1Full => (full, reduced),
            Orientation::R2Full => (reduced, full),
        }
    }

    fn encode(&self, w1: u64, w2: u64) -> Result<(u32, u32)> {
        self.cf_encode(w1, w2)
    }

    fn decode(&self, y: Output) -> Option<(u64, u64)> {
        self.cf_decode(y)
    }
}

/// Single-user code without cooperation: the idle user always sends symbol 1
/// and the active user picks among the first good entry of each block of that
/// row or column.
#[derive(Clone, Debug)]
pub struct IeCode<'a> {
    channel: &'a Channel,
    g: u32,
    active_user: User,
    codebook: Vec<u32>,
}

pub fn build_ie_code(channel: &Channel, user: User) -> Result<IeCode<'_>> {
    let b = &channel.matrix;
    let g = channel.g();
    let block = 1u32 << g;
    let blocks = b.side() / block;
    let mut codebook = Vec::with_capacity(blocks as usize);
    for k in 0..blocks {
        let entry = (k * block + 1..=(k + 1) * block).find(|&x| match user {
            User::User1 => b.is_good(x, 1),
            User::User2 => b.is_good(1, x),
        });
        match entry {
            Some(x) => codebook.push(x),
            None => {
                return Err(Error::Invariant(format!(
                    "block {} of the idle symbol's {} has no good entry",
                    k + 1,
                    if user == User::User1 { "column" } else { "row" }
                )))
            }
        }
    }
    Ok(IeCode { channel, g, active_user: user, codebook })
}

impl<'a> IeCode<'a> {
    pub fn codebook(&self) -> &[u32] {
        &self.codebook
    }

    pub fn active_user(&self) -> User {
        self.active_user
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn channel(&self) -> &'a Channel {
        self.channel
    }
}

impl BlockCode for IeCode<'_> {
    fn matrix(&self) -> &ChannelMatrix {
        &self.channel.matrix
    }

    fn message_sizes(&self) -> (u64, u64) {
        let n = self.codebook.len() as u64;
        match self.active_user {
            User::User1 => (n, 1),
            User::User2 => (1, n),
        }
    }

    fn encode(&self, w1: u64, w2: u64) -> Result<(u32, u32)> {
        let (s1, s2) = self.message_sizes();
        check_message(w1, s1, "first")?;
        check_message(w2, s2, "second")?;
        Ok(match self.active_user {
            User::User1 => (self.codebook[w1 as usize - 1], 1),
            User::User2 => (1, self.codebook[w2 as usize - 1]),
        })
    }

    fn decode(&self, y: Output) -> Option<(u64, u64)> {
        let Output::Pair(x1, x2) = y else { return None };
        let (x, idle) = match self.active_user {
            User::User1 => (x1, x2),
            User::User2 => (x2, x1),
        };
        if idle != 1 {
            return None;
        }
        let w = self.codebook.binary_search(&x).ok()? as u64 + 1;
        Some(match self.active_user {
            User::User1 => (w, 1),
            User::User2 => (1, w),
        })
    }
}

/// Both users send their message index directly.
#[derive(Clone, Copy, Debug)]
pub struct Uncoded<'a> {
    matrix: &'a ChannelMatrix,
}

impl<'a> Uncoded<'a> {
    pub fn new(matrix: &'a ChannelMatrix) -> Self {
        Self { matrix }
    }
}

impl BlockCode for Uncoded<'_> {
    fn matrix(&self) -> &ChannelMatrix {
        self.matrix
    }

    fn message_sizes(&self) -> (u64, u64) {
        let n = u64::from(self.matrix.side());
        (n, n)
    }

    fn encode(&self, w1: u64, w2: u64) -> Result<(u32, u32)> {
        let n = u64::from(self.matrix.side());
        check_message(w1, n, "first")?;
        check_message(w2, n, "second")?;
        Ok((w1 as u32, w2 as u32))
    }

    fn decode(&self, y: Output) -> Option<(u64, u64)> {
        match y {
            Output::Pair(a, b) => Some((u64::from(a), u64::from(b))),
            Output::Erasure => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroErrorReport {
    pub pairs_checked: u64,
    pub failures: u64,
}

impl ZeroErrorReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn transmit<C: BlockCode + ?Sized>(code: &C, w1: u64, w2: u64) -> Result<bool> {
    let (x1, x2) = code.encode(w1, w2)?;
    let y = code.matrix().apply(x1, x2)?;
    Ok(code.decode(y) == Some((w1, w2)))
}

/// Runs every message pair through encode, channel and decode.
pub fn verify_zero_error<C: BlockCode + Sync + ?Sized>(code: &C) -> Result<ZeroErrorReport> {
    let (s1, s2) = code.message_sizes();
    let failures = (1..=s1)
        .into_par_iter()
        .map(|w1| {
            (1..=s2).try_fold(0u64, |acc, w2| transmit(code, w1, w2).map(|ok| acc + u64::from(!ok)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ZeroErrorReport { pairs_checked: s1 * s2, failures })
}

/// Fraction of `trials` uniformly drawn message pairs that decode wrongly.
pub fn monte_carlo_error<C: BlockCode + ?Sized>(code: &C, trials: u64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial is needed".into()));
    }
    let (s1, s2) = code.message_sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0u64;
    for _ in 0..trials {
        let w1 = rng.gen_range(1..=s1);
        let w2 = rng.gen_range(1..=s2);
        failures += u64::from(!transmit(code, w1, w2)?);
    }
    Ok(failures as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{construct_channel, ConstructionParams};
    use proptest::prelude::*;

    fn params(m: u32, g: u32) -> ConstructionParams {
        ConstructionParams { m, p: 0.5, epsilon: 0.5, f_of_m: 1, g_of_m: g, seed: 0 }
    }

    fn checkerboard() -> Channel {
        Channel::verified(ChannelMatrix::from_fn(2, |i, j| (i + j) % 2 == 1), params(2, 1)).unwrap()
    }

    /// Facilitator that always answers 1.
    struct Careless<'a>(CfCode<'a>);

    impl BlockCode for Careless<'_> {
        fn matrix(&self) -> &ChannelMatrix {
            self.0.matrix()
        }
        fn message_sizes(&self) -> (u64, u64) {
            self.0.message_sizes()
        }
        fn encode(&self, w1: u64, w2: u64) -> Result<(u32, u32)> {
            self.0.encode_with(w1, w2, 1)
        }
        fn decode(&self, y: Output) -> Option<(u64, u64)> {
            self.0.decode(y)
        }
    }

    #[test]
    fn checkerboard_examples() {
        let ch = checkerboard();
        let code = CfCode::new(&ch, Orientation::R1Full).unwrap();
        assert_eq!(code.facilitator_output(1, 1).unwrap(), 1);
        assert_eq!(code.facilitator_output(2, 1).unwrap(), 2);
        assert_eq!(code.cf_encode(1, 1).unwrap(), (1, 1));
        assert_eq!(code.cf_encode(2, 1).unwrap(), (2, 2));
        assert_eq!(code.cf_decode(Output::Pair(2, 2)), Some((2, 1)));
        assert_eq!(code.cf_decode(Output::Erasure), None);
        let report = verify_zero_error(&code).unwrap();
        assert_eq!(report, ZeroErrorReport { pairs_checked: 8, failures: 0 });
        assert_eq!(code.sum_rate(), 3.0);
        assert!(code.cf_encode(5, 1).is_err());
        assert!(code.cf_encode(1, 3).is_err());
    }

    #[test]
    fn careless_facilitator() {
        let ch = checkerboard();
        let bad = Careless(CfCode::new(&ch, Orientation::R1Full).unwrap());
        assert_eq!(verify_zero_error(&bad).unwrap(), ZeroErrorReport { pairs_checked: 8, failures: 4 });
        let rate = monte_carlo_error(&bad, 100_000, 3).unwrap();
        assert!((rate - 0.5).abs() <= 0.01, "{rate}");
    }

    #[test]
    fn decode_with_larger_blocks() {
        let ch = Channel::verified(ChannelMatrix::zeros(3), params(3, 2)).unwrap();
        let code = CfCode::new(&ch, Orientation::R1Full).unwrap();
        assert_eq!(code.cf_decode(Output::Pair(5, 7)), Some((5, 2)));
        let code = CfCode::new(&ch, Orientation::R2Full).unwrap();
        assert_eq!(code.cf_decode(Output::Pair(7, 5)), Some((2, 5)));
    }

    #[test]
    fn all_zeros_channel() {
        for m in 1..=5 {
            for g in 1..=m {
                let ch = Channel::verified(ChannelMatrix::zeros(m), params(m, g)).unwrap();
                for o in [Orientation::R1Full, Orientation::R2Full] {
                    let code = CfCode::new(&ch, o).unwrap();
                    let (s1, s2) = code.message_sizes();
                    for w1 in 1..=s1 {
                        for w2 in 1..=s2 {
                            assert_eq!(code.facilitator_output(w1, w2).unwrap(), 1);
                        }
                    }
                    if o == Orientation::R1Full && g < m {
                        assert_eq!(code.cf_encode(2, 2).unwrap(), (2, (1 << g) + 1));
                    }
                    assert!(verify_zero_error(&code).unwrap().passed());
                }
            }
        }
    }

    #[test]
    fn unverified_channel_is_refused() {
        let ch = Channel::unverified(ChannelMatrix::zeros(2), params(2, 1)).unwrap();
        assert!(matches!(CfCode::new(&ch, Orientation::R1Full), Err(Error::Invariant(_))));
    }

    #[test]
    fn ie_examples() {
        let ch = Channel::verified(ChannelMatrix::zeros(2), params(2, 1)).unwrap();
        let code = build_ie_code(&ch, User::User1).unwrap();
        assert_eq!(code.codebook(), &[1, 3]);
        let ch = checkerboard();
        let code = build_ie_code(&ch, User::User1).unwrap();
        assert_eq!(code.codebook(), &[1, 3]);
        assert_eq!(code.message_sizes(), (2, 1));
        assert!(verify_zero_error(&code).unwrap().passed());
        let code = build_ie_code(&ch, User::User2).unwrap();
        assert_eq!(code.codebook(), &[1, 3]);
        assert!(verify_zero_error(&code).unwrap().passed());

        let broken = Channel::unverified(ChannelMatrix::ones(2), params(2, 1)).unwrap();
        assert!(matches!(build_ie_code(&broken, User::User1), Err(Error::Invariant(_))));
    }

    #[test]
    fn uncoded_on_all_ones() {
        let b = ChannelMatrix::ones(3);
        assert_eq!(monte_carlo_error(&Uncoded::new(&b), 1000, 1).unwrap(), 1.0);
        assert_eq!(verify_zero_error(&Uncoded::new(&b)).unwrap().failures, 64);
        assert!(monte_carlo_error(&Uncoded::new(&b), 0, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn constructed_codes_are_zero_error(m in 2u32..=7, g_off in 0u32..3, seed in any::<u64>()) {
            let g = (m - g_off.min(m - 1)).max(1);
            let params = ConstructionParams { m, p: 0.6, epsilon: 0.5, f_of_m: 1, g_of_m: g, seed };
            let ch = match construct_channel(&params, 50) {
                Ok(c) => c.channel,
                Err(_) => return Ok(()),
            };
            for o in [Orientation::R1Full, Orientation::R2Full] {
                let code = CfCode::new(&ch, o).unwrap();
                let (s1, s2) = code.message_sizes();
                prop_assert_eq!(s1 * s2, 1u64 << (2 * m - g));
                for w1 in 1..=s1 {
                    for w2 in 1..=s2 {
                        let (x1, x2) = code.cf_encode(w1, w2).unwrap();
                        prop_assert!(ch.matrix.is_good(x1, x2));
                        prop_assert_eq!(code.cf_decode(ch.apply(x1, x2).unwrap()), Some((w1, w2)));
                        // the full-rate input does not depend on z
                        for z in 1..=(1u32 << g) {
                            let (y1, y2) = code.encode_with(w1, w2, z).unwrap();
                            match o {
                                Orientation::R1Full => prop_assert_eq!(y1, x1),
                                Orientation::R2Full => prop_assert_eq!(y2, x2),
                            }
                        }
                    }
                }
            }
            let ie = build_ie_code(&ch, User::User1).unwrap();
            prop_assert_eq!(ie.codebook().len(), 1usize << (m - g));
            prop_assert!(ie.codebook().iter().all(|&x| ch.matrix.is_good(x, 1)));
        }
    }
}
