//! Monte Carlo summaries with confidence intervals.
//!
//! Sampling is chunked with a fixed chunk size and per-chunk RNG streams, then
//! reduced in chunk order, so the parallel and sequential paths give identical
//! results for a fixed seed.

use crate::error::{Error, Result};
use crate::exec;
use crate::rng::{BaseRng, RngStream};

/// Scalar Monte Carlo summary. `ci_halfwidth` is the 95% halfwidth
/// 1.96 * s / sqrt(n) with s the sample standard deviation.
#[derive(Debug, Clone)]
pub struct StatSummary {
    pub n: u64,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub ci_halfwidth: f64,
}

#[derive(Clone, Default)]
struct ScalarAcc {
    n: u64,
    sum: f64,
    sumsq: f64,
}

impl ScalarAcc {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sumsq += x * x;
    }

    fn merge(&mut self, other: &ScalarAcc) {
        self.n += other.n;
        self.sum += other.sum;
        self.sumsq += other.sumsq;
    }

    fn summary(&self) -> StatSummary {
        let n = self.n as f64;
        let mean = self.sum / n;
        let second = self.sumsq / n;
        // unbiased sample variance, clamped against rounding
        let variance = if self.n > 1 {
            ((self.sumsq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        StatSummary {
            n: self.n,
            mean,
            second_moment: second,
            variance,
            ci_halfwidth: 1.96 * (variance / n).sqrt(),
        }
    }
}

/// Summary from a fixed set of scalar samples.
pub fn summarize(samples: &[f64]) -> Result<StatSummary> {
    if samples.len() < 2 {
        return Err(Error::config("mc_summary requires n >= 2"));
    }
    let mut acc = ScalarAcc::default();
    for &x in samples {
        acc.push(x);
    }
    Ok(acc.summary())
}

fn chunk_acc<F>(sampler: &F, n: usize, stream: &RngStream, c: usize) -> ScalarAcc
where
    F: Fn(&mut BaseRng) -> f64,
{
    let mut rng = stream.child(c as u64).rng();
    let mut acc = ScalarAcc::default();
    for _ in 0..exec::chunk_len(n, c) {
        acc.push(sampler(&mut rng));
    }
    acc
}

fn reduce_chunks(chunks: Vec<ScalarAcc>) -> StatSummary {
    let mut total = ScalarAcc::default();
    for c in &chunks {
        total.merge(c);
    }
    total.summary()
}

/// Monte Carlo summary of a scalar sampler over `n` draws.
pub fn mc_summary<F>(sampler: &F, n: usize, stream: &RngStream) -> Result<StatSummary>
where
    F: Fn(&mut BaseRng) -> f64 + Sync,
{
    if n < 2 {
        return Err(Error::config("mc_summary requires n >= 2"));
    }
    let chunks = exec::map_indexed(exec::n_chunks(n), |c| chunk_acc(sampler, n, stream, c));
    Ok(reduce_chunks(chunks))
}

/// Always-sequential variant of [`mc_summary`]; same output, used by benches.
pub fn mc_summary_seq<F>(sampler: &F, n: usize, stream: &RngStream) -> Result<StatSummary>
where
    F: Fn(&mut BaseRng) -> f64 + Sync,
{
    if n < 2 {
        return Err(Error::config("mc_summary requires n >= 2"));
    }
    let chunks = exec::map_indexed_seq(exec::n_chunks(n), |c| chunk_acc(sampler, n, stream, c));
    Ok(reduce_chunks(chunks))
}

/// Per-coordinate Monte Carlo summary for a vector-valued sampler, plus a
/// scalar summary of the squared q-norm of the samples.
#[derive(Debug, Clone)]
pub struct VectorSummary {
    pub n: u64,
    pub mean: Vec<f64>,
    /// Standard error of each coordinate mean.
    pub coord_se: Vec<f64>,
    pub qnorm_sq: StatSummary,
}

#[derive(Clone)]
struct VectorAcc {
    n: u64,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    qn: ScalarAcc,
}

impl VectorAcc {
    fn new(d: usize) -> Self {
        VectorAcc {
            n: 0,
            sum: vec![0.0; d],
            sumsq: vec![0.0; d],
            qn: ScalarAcc::default(),
        }
    }

    fn push(&mut self, v: &[f64], q: f64) {
        self.n += 1;
        for ((s, sq), vi) in self.sum.iter_mut().zip(&mut self.sumsq).zip(v) {
            *s += vi;
            *sq += vi * vi;
        }
        let nq = crate::vector::norm_q(v, q);
        self.qn.push(nq * nq);
    }

    fn merge(&mut self, other: &VectorAcc) {
        self.n += other.n;
        for ((s, sq), (os, osq)) in self
            .sum
            .iter_mut()
            .zip(&mut self.sumsq)
            .zip(other.sum.iter().zip(&other.sumsq))
        {
            *s += os;
            *sq += osq;
        }
        self.qn.merge(&other.qn);
    }
}

/// Monte Carlo summary of a vector sampler over `n` draws; `q` selects the
/// norm for the second-moment track (`f64::INFINITY` for the max-norm).
pub fn mc_vector_summary<F>(
    sampler: &F,
    d: usize,
    q: f64,
    n: usize,
    stream: &RngStream,
) -> Result<VectorSummary>
where
    F: Fn(&mut BaseRng) -> Vec<f64> + Sync,
{
    if n < 2 {
        return Err(Error::config("mc_vector_summary requires n >= 2"));
    }
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let chunks = exec::map_indexed(exec::n_chunks(n), |c| {
        let mut rng = stream.child(c as u64).rng();
        let mut acc = VectorAcc::new(d);
        for _ in 0..exec::chunk_len(n, c) {
            let v = sampler(&mut rng);
            acc.push(&v, q);
        }
        acc
    });
    let mut total = VectorAcc::new(d);
    for c in &chunks {
        total.merge(c);
    }
    let nf = total.n as f64;
    let mean: Vec<f64> = total.sum.iter().map(|s| s / nf).collect();
    let coord_se: Vec<f64> = (0..d)
        .map(|i| {
            let var = ((total.sumsq[i] - total.sum[i] * total.sum[i] / nf) / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        })
        .collect();
    Ok(VectorSummary {
        n: total.n,
        mean,
        coord_se,
        qnorm_sq: total.qn.summary(),
    })
}

/// Median of a sample set (average of the middle pair for even n).
pub fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
