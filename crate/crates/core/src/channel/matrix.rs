use std::fmt;

use crate::error::{Error, Result};

/// Largest alphabet exponent a [`ChannelMatrix`] can be built for at all.
/// Callers taking `m` from user input should enforce a [`MemoryCap`](super::MemoryCap) first.
pub const MAX_SUPPORTED_M: u32 = 16;

/// Channel output: the transmitted pair on a good entry, or the erasure pair `(E, E)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Pair(u32, u32),
    Erasure,
}

/// A `2^m x 2^m` binary matrix stored row-major, one bit per entry.
///
/// Entry `(i, j)` is 1 ("bad") when the input pair `(i, j)` is erased and 0
/// ("good") when it passes through. Indices are 1-based at the public surface.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChannelMatrix {
    m: u32,
    words: Vec<u64>,
}

impl ChannelMatrix {
    fn filled(m: u32, word: u64) -> Self {
        assert!(
            (1..=MAX_SUPPORTED_M).contains(&m),
            "alphabet exponent {m} outside 1..={MAX_SUPPORTED_M}"
        );
        let bits = 1usize << (2 * m);
        let mut words = vec![word; bits.div_ceil(64)];
        if !bits.is_multiple_of(64) {
            // keep padding bits clear so equality is structural
            let last = words.len() - 1;
            words[last] &= (1u64 << (bits % 64)) - 1;
        }
        Self { m, words }
    }

    /// All entries good.
    pub fn zeros(m: u32) -> Self {
        Self::filled(m, 0)
    }

    /// All entries bad.
    pub fn ones(m: u32) -> Self {
        Self::filled(m, !0)
    }

    /// Builds a matrix from a predicate on 1-based `(row, col)`; `true` marks a bad entry.
    pub fn from_fn(m: u32, mut bad: impl FnMut(u32, u32) -> bool) -> Self {
        let mut out = Self::zeros(m);
        let side = out.side();
        for i in 1..=side {
            for j in 1..=side {
                if bad(i, j) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }

    /// Parses rows written as strings of `0`/`1`.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let side = rows.len();
        if !side.is_power_of_two() || side < 2 {
            return Err(Error::Domain(format!("{side} rows is not 2^m for m >= 1")));
        }
        let m = side.trailing_zeros();
        if m > MAX_SUPPORTED_M {
            return Err(Error::ResourceLimit { m, max_m: MAX_SUPPORTED_M });
        }
        let mut out = Self::zeros(m);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref().as_bytes();
            if row.len() != side {
                return Err(Error::Domain(format!(
                    "row {} has {} entries, expected {side}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                match c {
                    b'0' => {}
                    b'1' => out.set(i as u32 + 1, j as u32 + 1, true),
                    _ => return Err(Error::Domain(format!("invalid entry {:?}", c as char))),
                }
            }
        }
        Ok(out)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Alphabet size `2^m`.
    pub fn side(&self) -> u32 {
        1 << self.m
    }

    pub fn num_entries(&self) -> usize {
        1usize << (2 * self.m)
    }

    #[inline]
    fn flat(&self, i: u32, j: u32) -> usize {
        let side = self.side();
        assert!(
            (1..=side).contains(&i) && (1..=side).contains(&j),
            "entry ({i}, {j}) outside 1..={side}"
        );
        (i as usize - 1) * side as usize + (j as usize - 1)
    }

    /// Bit at a 0-based row-major position.
    #[inline]
    pub(crate) fn bit(&self, idx: usize) -> bool {
        (self.words[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, idx: usize, bad: bool) {
        let mask = 1u64 << (idx & 63);
        if bad {
            self.words[idx >> 6] |= mask;
        } else {
            self.words[idx >> 6] &= !mask;
        }
    }

    /// `b_ij == 1`. Panics when an index is outside `1..=2^m`.
    #[inline]
    pub fn is_bad(&self, i: u32, j: u32) -> bool {
        self.bit(self.flat(i, j))
    }

    #[inline]
    pub fn is_good(&self, i: u32, j: u32) -> bool {
        !self.is_bad(i, j)
    }

    pub fn set(&mut self, i: u32, j: u32, bad: bool) {
        let idx = self.flat(i, j);
        self.set_bit(idx, bad);
    }

    pub fn count_bad(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Columns `j` with `b_ij = 0`, ascending.
    pub fn good_in_row(&self, i: u32) -> impl Iterator<Item = u32> + '_ {
        (1..=self.side()).filter(move |&j| self.is_good(i, j))
    }

    /// Rows `i` with `b_ij = 0`, ascending.
    pub fn good_in_col(&self, j: u32) -> impl Iterator<Item = u32> + '_ {
        (1..=self.side()).filter(move |&i| self.is_good(i, j))
    }

    pub fn transpose(&self) -> Self {
        let side = self.side() as usize;
        let mut out = Self::zeros(self.m);
        for i in 0..side {
            let row = i * side;
            for j in 0..side {
                if self.bit(row + j) {
                    out.set_bit(j * side + i, true);
                }
            }
        }
        out
    }

    /// True when the `len` consecutive entries of 0-based row `row` starting at
    /// 0-based column `col0` are all bad.
    pub(crate) fn row_segment_all_bad(&self, row: usize, col0: usize, len: usize) -> bool {
        let mut pos = row * self.side() as usize + col0;
        let end = pos + len;
        while pos < end {
            let off = pos & 63;
            let take = (64 - off).min(end - pos);
            let mask = if take == 64 { !0 } else { ((1u64 << take) - 1) << off };
            if self.words[pos >> 6] & mask != mask {
                return false;
            }
            pos += take;
        }
        true
    }

    /// Applies the channel law: pass-through on a good entry, erasure on a bad one.
    pub fn apply(&self, x1: u32, x2: u32) -> Result<Output> {
        let side = self.side();
        for (name, x) in [("x1", x1), ("x2", x2)] {
            if !(1..=side).contains(&x) {
                return Err(Error::Domain(format!("{name} = {x} outside 1..={side}")));
            }
        }
        Ok(if self.is_bad(x1, x2) { Output::Erasure } else { Output::Pair(x1, x2) })
    }
}

impl fmt::Debug for ChannelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChannelMatrix(m={}", self.m)?;
        if self.m <= 4 {
            for i in 1..=self.side() {
                f.write_str(if i == 1 { "; " } else { "/" })?;
                for j in 1..=self.side() {
                    f.write_str(if self.is_bad(i, j) { "1" } else { "0" })?;
                }
            }
        } else {
            write!(f, ", bad={}", self.count_bad())?;
        }
        f.write_str(")")
    }
}
