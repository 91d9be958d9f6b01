use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProbVector;
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::scalar::{neg_xlog2x, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForce<T> {
    pub value: T,
    pub p1: ProbVector<T>,
    pub p2: ProbVector<T>,
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Best `p1` on the grid for a fixed `p2`, as `(value, counts)`.
struct Row<'a, T> {
    /// `phi[i][a] = u_i h(a/s) + (a/s) w_i`.
    phi: &'a [Vec<T>],
    /// bad mass numerators of `p2` per row, in units of `1/s`.
    bad: &'a [u32],
    /// `h(k / s^2)` for every erasure numerator `k`.
    erasure: &'a [T],
    steps: u32,
}

impl<T: Real> Row<'_, T> {
    fn search(&self, level: usize, left: u32, acc: T, erased: u32, counts: &mut Vec<u32>, best: &mut (T, Vec<u32>)) {
        let n = self.phi.len();
        if level + 2 == n {
            let (ba, bb) = (self.bad[level], self.bad[level + 1]);
            let len = left as usize;
            // walk the line from whichever end makes the erasure index increase
            let (first, second, stride, start) = if ba >= bb {
                (&self.phi[level], &self.phi[level + 1], (ba - bb) as usize, (erased + bb * left) as usize)
            } else {
                (&self.phi[level + 1], &self.phi[level], (bb - ba) as usize, (erased + ba * left) as usize)
            };
            let (first, second) = (&first[..=len], &second[..=len]);
            let erasure = &self.erasure[start..=start + stride * len];
            let mut line_best = T::neg_infinity();
            let mut line_arg = 0;
            for k in 0..=len {
                let v = first[k] + second[len - k] + erasure[stride * k];
                if v > line_best {
                    line_best = v;
                    line_arg = k as u32;
                }
            }
            let v = acc + line_best;
            if v > best.0 {
                let (a, rest) = if ba >= bb { (line_arg, left - line_arg) } else { (left - line_arg, line_arg) };
                best.0 = v;
                best.1.clear();
                best.1.extend_from_slice(counts);
                best.1.extend([a, rest]);
            }
            return;
        }
        for a in 0..=left {
            counts.push(a);
            let phi = self.phi[level][a as usize];
            self.search(level + 1, left - a, acc + phi, erased + self.bad[level] * a, counts, best);
            counts.pop();
        }
    }
}

/// Exhaustive maximization of the sum rate over all pairs of input laws whose
/// masses are multiples of `1 / grid_steps`. Exponential in the alphabet, so
/// only channels with at most four inputs per user are accepted.
pub fn brute_force_sum_capacity<T: Real>(b: &ChannelMatrix, grid_steps: u32) -> Result<BruteForce<T>> {
    let n = b.side() as usize;
    if n > 4 {
        return Err(Error::Domain(format!("grid search needs 2^m <= 4, got 2^m = {n}")));
    }
    if grid_steps == 0 || grid_steps > 4096 {
        return Err(Error::InvalidParams(format!("grid_steps = {grid_steps} outside 1..=4096")));
    }
    let s = grid_steps;
    let scale = T::count(s as usize);
    let h_grid: Vec<T> = (0..=s).map(|k| neg_xlog2x(T::count(k as usize) / scale)).collect();
    let sq = (s * s) as usize;
    let erasure: Vec<T> = (0..=sq).map(|k| neg_xlog2x(T::count(k) / T::count(sq))).collect();
    let grid = compositions(s, n);
    let (value, i1, i2) = grid
        .par_iter()
        .enumerate()
        .map(|(idx, c2)| {
            let mut bad = vec![0u32; n];
            let mut phi = Vec::with_capacity(n);
            for (i, bad_i) in bad.iter_mut().enumerate() {
                let mut w = T::zero();
                for (j, &c) in c2.iter().enumerate() {
                    if b.is_bad(i as u32 + 1, j as u32 + 1) {
                        *bad_i += c;
                    } else {
                        w = w + h_grid[c as usize];
                    }
                }
                let u = T::count((s - *bad_i) as usize) / scale;
                phi.push(
                    (0..=s)
                        .map(|a| u * h_grid[a as usize] + T::count(a as usize) / scale * w)
                        .collect::<Vec<T>>(),
                );
            }
            let row = Row { phi: &phi, bad: &bad, erasure: &erasure, steps: s };
            let mut best = (T::neg_infinity(), Vec::new());
            row.search(0, row.steps, T::zero(), 0, &mut Vec::with_capacity(n), &mut best);
            (best.0, best.1, idx)
        })
        .reduce(
            || (T::neg_infinity(), Vec::new(), usize::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.2 < a.2) { b } else { a },
        );
    let to_law = |c: &[u32]| ProbVector::from_raw(c.iter().map(|&k| T::count(k as usize) / scale).collect());
    Ok(BruteForce { value, p1: to_law(&i1), p2: to_law(&grid[i2]) })
}
