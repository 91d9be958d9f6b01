//! `MACCF 1` channel files.
//!
//! ```text
//! MACCF 1 m=<int> p=<decimal> eps=<decimal> f=<int> g=<int> seed=<uint>
//! <2^m lines of 2^m characters from {0,1}>
//! ```
//!
//! The binary variant keeps the header line and follows it with the row-major
//! bits packed eight per byte, first entry in the most significant bit. Readers
//! tell the two apart by body length.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{Channel, ChannelMatrix, ConstructionParams, MemoryCap};
use crate::error::{Error, Result};

const MAGIC: &str = "MACCF";
const VERSION: &str = "1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Encoding {
    #[default]
    Text,
    Binary,
}

fn header(params: &ConstructionParams) -> String {
    format!(
        "{MAGIC} {VERSION} m={} p={} eps={} f={} g={} seed={}\n",
        params.m, params.p, params.epsilon, params.f_of_m, params.g_of_m, params.seed
    )
}

pub fn serialize_channel(ch: &Channel, encoding: Encoding) -> Vec<u8> {
    let b = &ch.matrix;
    let side = b.side() as usize;
    let mut out = header(&ch.params).into_bytes();
    match encoding {
        Encoding::Text => {
            out.reserve(side * (side + 1));
            for i in 0..side {
                out.extend((0..side).map(|j| if b.bit(i * side + j) { b'1' } else { b'0' }));
                out.push(b'\n');
            }
        }
        Encoding::Binary => {
            let n = b.num_entries();
            let mut byte = 0u8;
            for idx in 0..n {
                if b.bit(idx) {
                    byte |= 0x80 >> (idx % 8);
                }
                if idx % 8 == 7 {
                    out.push(byte);
                    byte = 0;
                }
            }
            if !n.is_multiple_of(8) {
                out.push(byte);
            }
        }
    }
    out
}

pub fn deserialize_channel(bytes: &[u8]) -> Result<Channel> {
    deserialize_channel_capped(bytes, MemoryCap::default())
}

fn malformed<T>(offset: usize, reason: impl Into<String>) -> Result<T> {
    Err(Error::Malformed { offset, reason: reason.into() })
}

struct HeaderParser<'a> {
    line: &'a str,
    pos: usize,
}

impl<'a> HeaderParser<'a> {
    fn token(&mut self) -> Option<(usize, &'a str)> {
        let rest = &self.line[self.pos..];
        let start = self.pos + (rest.len() - rest.trim_start_matches(' ').len());
        if start >= self.line.len() {
            self.pos = start;
            return None;
        }
        let end = self.line[start..].find(' ').map_or(self.line.len(), |e| start + e);
        self.pos = end;
        Some((start, &self.line[start..end]))
    }

    fn field<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let Some((at, tok)) = self.token() else {
            return malformed(self.pos, format!("missing field `{key}`"));
        };
        let Some(value) = tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')) else {
            return malformed(at, format!("expected `{key}=`, found `{tok}`"));
        };
        value
            .parse()
            .or_else(|_| malformed(at + key.len() + 1, format!("invalid value for `{key}`: `{value}`")))
    }
}

fn parse_header(line: &str) -> Result<ConstructionParams> {
    let mut hp = HeaderParser { line, pos: 0 };
    match hp.token() {
        Some((_, MAGIC)) => {}
        Some((at, tok)) => return malformed(at, format!("expected `{MAGIC}`, found `{tok}`")),
        None => return malformed(0, "empty header"),
    }
    match hp.token() {
        Some((_, VERSION)) => {}
        Some((at, tok)) => return malformed(at, format!("unsupported version `{tok}`")),
        None => return malformed(hp.pos, "missing version"),
    }
    let params = ConstructionParams {
        m: hp.field("m")?,
        p: hp.field("p")?,
        epsilon: hp.field("eps")?,
        f_of_m: hp.field("f")?,
        g_of_m: hp.field("g")?,
        seed: hp.field("seed")?,
    };
    if let Some((at, tok)) = hp.token() {
        return malformed(at, format!("unexpected trailing field `{tok}`"));
    }
    Ok(params)
}

/// Parses either encoding. Rejects headers whose `m` exceeds `cap` before
/// allocating anything.
pub fn deserialize_channel_capped(bytes: &[u8], cap: MemoryCap) -> Result<Channel> {
    if bytes.is_empty() {
        return malformed(0, "empty input");
    }
    let Some(nl) = bytes.iter().position(|&c| c == b'\n') else {
        return malformed(bytes.len(), "header line is not terminated");
    };
    let line = std::str::from_utf8(&bytes[..nl])
        .or_else(|e| malformed(e.valid_up_to(), "header is not UTF-8"))?;
    let params = parse_header(line.trim_end_matches('\r'))?;
    if params.m == 0 {
        return malformed(0, "m must be at least 1");
    }
    cap.check(params.m)?;
    params
        .validate()
        .or_else(|e| malformed(0, e.to_string()))?;

    let body_start = nl + 1;
    let body = &bytes[body_start..];
    let mut matrix = ChannelMatrix::zeros(params.m);
    let side = matrix.side() as usize;
    let n = matrix.num_entries();

    if body.len() == n.div_ceil(8) {
        for idx in 0..n {
            if body[idx / 8] & (0x80 >> (idx % 8)) != 0 {
                matrix.set_bit(idx, true);
            }
        }
    } else {
        let mut pos = 0;
        for i in 0..side {
            let row_at = body_start + pos;
            if pos + side > body.len() {
                return malformed(
                    body_start + body.len(),
                    format!("expected {side} rows of {side} bits, input ends in row {}", i + 1),
                );
            }
            for j in 0..side {
                match body[pos + j] {
                    b'0' => {}
                    b'1' => matrix.set_bit(i * side + j, true),
                    c => {
                        return malformed(
                            row_at + j,
                            format!("row {} has invalid character {:?}", i + 1, c as char),
                        )
                    }
                }
            }
            pos += side;
            match body.get(pos) {
                Some(b'\n') => pos += 1,
                Some(b'\r') if body.get(pos + 1) == Some(&b'\n') => pos += 2,
                None if i + 1 == side => {}
                _ => return malformed(body_start + pos, format!("row {} is longer than {side} bits", i + 1)),
            }
        }
        if pos != body.len() {
            return malformed(body_start + pos, "trailing data after the last row");
        }
    }
    Channel::unverified(matrix, params)
}

pub fn write_channel_file(path: impl AsRef<Path>, ch: &Channel, encoding: Encoding) -> Result<()> {
    fs::write(path, serialize_channel(ch, encoding))?;
    Ok(())
}

pub fn read_channel_file(path: impl AsRef<Path>, cap: MemoryCap) -> Result<Channel> {
    deserialize_channel_capped(&fs::read(path)?, cap)
}
