use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{check_dims, erasure_term};
use super::ProbVector;
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::scalar::{neg_xlog2x, Real};

/// Good entries of a channel in compressed row and column form.
pub(crate) struct GoodGraph {
    row_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    col_ptr: Vec<usize>,
    col_idx: Vec<u32>,
}

impl GoodGraph {
    pub(crate) fn new(b: &ChannelMatrix) -> Self {
        let n = b.side() as usize;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut col_count = vec![0usize; n];
        row_ptr.push(0);
        for i in 0..n {
            for (j, count) in col_count.iter_mut().enumerate() {
                if !b.bit(i * n + j) {
                    row_idx.push(j as u32);
                    *count += 1;
                }
            }
            row_ptr.push(row_idx.len());
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        for c in &col_count {
            col_ptr.push(col_ptr.last().unwrap() + c);
        }
        let mut fill = col_ptr[..n].to_vec();
        let mut col_idx = vec![0u32; row_idx.len()];
        for i in 0..n {
            for &j in &row_idx[row_ptr[i]..row_ptr[i + 1]] {
                col_idx[fill[j as usize]] = i as u32;
                fill[j as usize] += 1;
            }
        }
        Self { row_ptr, row_idx, col_ptr, col_idx }
    }

    fn neighbours(&self, transpose: bool, i: usize) -> &[u32] {
        if transpose {
            &self.col_idx[self.col_ptr[i]..self.col_ptr[i + 1]]
        } else {
            &self.row_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
        }
    }
}

/// `H(Y)` as a function of one user's law with the other fixed:
/// `F(p) = sum_i [ u_i h(p_i) + p_i w_i ] + h(sum_i p_i e_i)`.
struct Coefficients<T> {
    good: Vec<T>,
    spread: Vec<T>,
    bad: Vec<T>,
}

impl<T: Real> Coefficients<T> {
    fn new(graph: &GoodGraph, transpose: bool, other: &[T]) -> Self {
        let n = other.len();
        let mut good = Vec::with_capacity(n);
        let mut spread = Vec::with_capacity(n);
        let mut bad = Vec::with_capacity(n);
        for i in 0..n {
            let (mut u, mut w) = (T::zero(), T::zero());
            for &j in graph.neighbours(transpose, i) {
                let q = other[j as usize];
                u = u + q;
                w = w + neg_xlog2x(q);
            }
            good.push(u);
            spread.push(w);
            bad.push((T::one() - u).max(T::zero()));
        }
        Self { good, spread, bad }
    }

    fn value(&self, p: &[T]) -> T {
        let mut total = T::zero();
        let mut erased = T::zero();
        let mut delivered = T::zero();
        for (i, &pi) in p.iter().enumerate() {
            if pi > T::zero() {
                total = total + self.good[i] * neg_xlog2x(pi) + pi * self.spread[i];
                erased = erased + pi * self.bad[i];
                delivered = delivered + pi * self.good[i];
            }
        }
        total + erasure_term(erased, delivered)
    }

    /// Gradient up to a common additive constant, which the simplex projection ignores.
    fn gradient(&self, p: &[T]) -> Vec<T> {
        let floor = T::min_positive_value();
        let erased: T = p.iter().zip(&self.bad).map(|(&pi, &e)| pi * e).sum();
        let log_e = erased.max(floor).log2();
        p.iter()
            .enumerate()
            .map(|(i, &pi)| -self.good[i] * pi.max(floor).log2() + self.spread[i] - self.bad[i] * log_e)
            .collect()
    }
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite gradient"));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (k, &x) in sorted.iter().enumerate() {
        cumulative = cumulative + x;
        let t = (cumulative - T::one()) / T::count(k + 1);
        if x - t > T::zero() {
            theta = t;
        }
    }
    let mut out: Vec<T> = v.iter().map(|&x| (x - theta).max(T::zero())).collect();
    let total: T = out.iter().copied().sum();
    if total > T::zero() {
        for x in &mut out {
            *x = *x / total;
        }
    }
    out
}

/// Projected gradient ascent with backtracking; never lowers the objective.
fn ascend<T: Real>(p: &mut Vec<T>, coef: &Coefficients<T>, opts: &AltOptions<T>) -> T {
    let mut value = coef.value(p);
    let mut step = T::one();
    let min_step = T::lit(1e-30);
    for _ in 0..opts.inner_iters {
        let grad = coef.gradient(p);
        let accepted = loop {
            let trial: Vec<T> = p.iter().zip(&grad).map(|(&x, &g)| x + step * g).collect();
            let q = project_simplex(&trial);
            let fq = coef.value(&q);
            let dir: T = grad.iter().zip(q.iter().zip(p.iter())).map(|(&g, (&a, &b))| g * (a - b)).sum();
            if fq >= value && fq >= value + T::lit(1e-4) * dir {
                break Some((q, fq));
            }
            step = step * T::lit(0.5);
            if step < min_step {
                break None;
            }
        };
        let Some((q, fq)) = accepted else { break };
        let gain = fq - value;
        *p = q;
        value = fq;
        if gain <= opts.inner_tol {
            break;
        }
        step = step * T::lit(2.0);
    }
    value
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AltOptions<T> {
    /// Maximum number of full sweeps (one update of each user).
    pub max_iters: usize,
    /// Stop once a sweep gains less than this.
    pub tol: T,
    pub inner_iters: usize,
    pub inner_tol: T,
}

impl<T: Real> Default for AltOptions<T> {
    fn default() -> Self {
        Self { max_iters: 200, tol: T::lit(1e-9), inner_iters: 50, inner_tol: T::lit(1e-10) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AltResult<T> {
    pub p1: ProbVector<T>,
    pub p2: ProbVector<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after initialization and after each sweep; nondecreasing.
    pub trace: Vec<T>,
}

fn alternate<T: Real>(
    graph: &GoodGraph,
    init1: &ProbVector<T>,
    init2: &ProbVector<T>,
    opts: &AltOptions<T>,
) -> AltResult<T> {
    let mut p1 = init1.as_slice().to_vec();
    let mut p2 = init2.as_slice().to_vec();
    let mut value = Coefficients::new(graph, false, &p2).value(&p1);
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        let mut q1 = p1.clone();
        ascend(&mut q1, &Coefficients::new(graph, false, &p2), opts);
        let mut q2 = p2.clone();
        let next = ascend(&mut q2, &Coefficients::new(graph, true, &q1), opts);
        if next < value {
            // rounding noise from re-deriving the coefficients; keep the better point
            trace.push(value);
            converged = true;
            break;
        }
        let gain = next - value;
        p1 = q1;
        p2 = q2;
        value = next;
        trace.push(value);
        if gain < opts.tol {
            converged = true;
            break;
        }
    }
    AltResult { p1: ProbVector::from_raw(p1), p2: ProbVector::from_raw(p2), value, iterations, converged, trace }
}

/// Block-coordinate ascent of `I(X1, X2; Y)` over independent input laws,
/// alternating between the two users. Each block subproblem is concave.
pub fn alternating_maximization<T: Real>(
    b: &ChannelMatrix,
    init1: &ProbVector<T>,
    init2: &ProbVector<T>,
    opts: &AltOptions<T>,
) -> Result<AltResult<T>> {
    check_dims(b, init1, init2)?;
    Ok(alternate(&GoodGraph::new(b), init1, init2, opts))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig<T> {
    /// Random starting points in addition to the uniform start.
    pub restarts: usize,
    pub seed: u64,
    pub alt: AltOptions<T>,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self { restarts: 8, seed: 0, alt: AltOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate<T> {
    pub best: AltResult<T>,
    /// Final value of every start, uniform first.
    pub values: Vec<T>,
    pub restarts: usize,
}

impl<T: Real> CapacityEstimate<T> {
    pub fn value(&self) -> T {
        self.best.value
    }
}

/// Best of the uniform start and `restarts` random starts (seeds `seed + k`).
/// A lower estimate of the no-cooperation sum-capacity.
pub fn estimate_sum_capacity<T: Real>(b: &ChannelMatrix, config: &OptimizerConfig<T>) -> Result<CapacityEstimate<T>> {
    if !(config.alt.tol >= T::zero()) {
        return Err(Error::InvalidParams(format!("tol = {} must be nonnegative", config.alt.tol)));
    }
    let n = b.side() as usize;
    let graph = GoodGraph::new(b);
    let starts: Vec<(ProbVector<T>, ProbVector<T>)> = std::iter::once((ProbVector::uniform(n), ProbVector::uniform(n)))
        .chain((0..config.restarts as u64).map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(k));
            let p1 = ProbVector::random(n, &mut rng);
            (p1, ProbVector::random(n, &mut rng))
        }))
        .collect();
    let runs: Vec<AltResult<T>> = starts
        .par_iter()
        .map(|(p1, p2)| alternate(&graph, p1, p2, &config.alt))
        .collect();
    let values: Vec<T> = runs.iter().map(|r| r.value).collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least the uniform start");
    Ok(CapacityEstimate { best, values, restarts: config.restarts })
}
