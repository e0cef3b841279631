//! Seeded Monte Carlo replay of engine cycles.
//!
//! Each cycle draws the system state from `(a, b)`, then the meter outcome
//! from that branch's exact Gaussian, and applies the threshold rule.
//!
//! Samples are generated in fixed-length blocks. Block `k` is drawn from
//! ChaCha8 keyed by the user seed with stream id `k`, so any block can be
//! produced independently of the others. Block statistics are always merged
//! in block order, which makes the final estimate bit-identical no matter
//! how blocks are distributed over shards or threads.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::engine::initial_entropy;
use crate::error::{domain, Result};
use crate::model::{branch_center, posterior, Branch, EngineParams, OperatingPoint};
use crate::numerics::xlogx_unchecked;

/// Samples per RNG block.
pub const MC_BLOCK_LEN: u64 = 1 << 14;

const MIN_SAMPLES: u64 = 1_000;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// `sample_std / √n`.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Distance from `value` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.std_error > 0.0 {
            (self.mean - value).abs() / self.std_error
        } else if self.mean == value {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub w_out: McEstimate,
    pub info_gain: McEstimate,
    pub attempt_fraction: McEstimate,
}

/// Running mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Moments {
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, n: u64, x: f64) {
        let delta = x - self.mean;
        self.mean += delta / n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, n_self: u64, other: Moments, n_other: u64) -> Moments {
        if n_self == 0 {
            return other;
        }
        if n_other == 0 {
            return self;
        }
        let n = (n_self + n_other) as f64;
        let delta = other.mean - self.mean;
        Moments {
            mean: self.mean + delta * n_other as f64 / n,
            m2: self.m2 + other.m2 + delta * delta * n_self as f64 * n_other as f64 / n,
        }
    }

    fn estimate(&self, n: u64, seed: u64) -> McEstimate {
        let var = if n > 1 { self.m2 / (n - 1) as f64 } else { 0.0 };
        McEstimate {
            mean: self.mean,
            std_error: libm::sqrt(var.max(0.0) / n as f64),
            n_samples: n,
            seed,
        }
    }
}

/// Partial statistics of one or more sample blocks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlockStats {
    pub n: u64,
    w_out: Moments,
    info_gain: Moments,
    attempt: Moments,
}

impl BlockStats {
    pub fn merge(self, other: BlockStats) -> BlockStats {
        BlockStats {
            n: self.n + other.n,
            w_out: self.w_out.merge(self.n, other.w_out, other.n),
            info_gain: self.info_gain.merge(self.n, other.info_gain, other.n),
            attempt: self.attempt.merge(self.n, other.attempt, other.n),
        }
    }

    pub fn finish(&self, seed: u64) -> McReport {
        McReport {
            w_out: self.w_out.estimate(self.n, seed),
            info_gain: self.info_gain.estimate(self.n, seed),
            attempt_fraction: self.attempt.estimate(self.n, seed),
        }
    }
}

/// Number of blocks covering `n` samples.
pub fn block_count(n: u64) -> u64 {
    n.div_ceil(MC_BLOCK_LEN)
}

fn block_len(n: u64, block: u64) -> u64 {
    MC_BLOCK_LEN.min(n - block * MC_BLOCK_LEN)
}

/// Draws block `block` of an `n`-sample run.
pub fn mc_block(
    params: &EngineParams,
    pt: &OperatingPoint,
    n: u64,
    seed: u64,
    block: u64,
) -> BlockStats {
    let len = block_len(n, block);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);

    let s0 = initial_entropy(params);
    let mut stats = BlockStats::default();
    for i in 1..=len {
        let branch = if rng.random::<f64>() < params.pop_b {
            Branch::Excited
        } else {
            Branch::Ground
        };
        let z: f64 = rng.sample(StandardNormal);
        // Branch densities have standard deviation 1/2 in reduced momentum.
        let u = branch_center(branch, pt.t_bar) + 0.5 * z;

        let attempt = u <= pt.u_prime;
        let excited = if branch == Branch::Excited { 1.0 } else { 0.0 };
        let work = if attempt {
            params.delta_e * (excited - params.pop_b)
        } else {
            0.0
        };
        let h = -(xlogx_unchecked(posterior(Branch::Ground, u, pt, params))
            + xlogx_unchecked(posterior(Branch::Excited, u, pt, params)));

        stats.w_out.push(i, work);
        stats.info_gain.push(i, s0 - h);
        stats.attempt.push(i, if attempt { 1.0 } else { 0.0 });
    }
    stats.n = len;
    stats
}

/// Merges block statistics in iteration order.
pub fn merge_blocks<I: IntoIterator<Item = BlockStats>>(blocks: I) -> BlockStats {
    blocks
        .into_iter()
        .fold(BlockStats::default(), BlockStats::merge)
}

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(domain("Monte Carlo needs at least 1000 samples"));
    }
    Ok(())
}

/// Monte Carlo estimates of `W_out`, the information gain and the attempt
/// fraction from `n` simulated cycles.
pub fn mc_cycles(
    params: &EngineParams,
    pt: &OperatingPoint,
    n: u64,
    seed: u64,
) -> Result<McReport> {
    check_samples(n)?;
    let stats = merge_blocks((0..block_count(n)).map(|b| mc_block(params, pt, n, seed, b)));
    Ok(stats.finish(seed))
}

/// Same estimate as [`mc_cycles`], computed as `shards` contiguous runs of
/// blocks. The result does not depend on `shards`.
pub fn mc_cycles_sharded(
    params: &EngineParams,
    pt: &OperatingPoint,
    n: u64,
    seed: u64,
    shards: usize,
) -> Result<McReport> {
    check_samples(n)?;
    if shards == 0 {
        return Err(domain("shard count must be positive"));
    }
    let blocks = block_count(n);
    let per_shard = blocks.div_ceil(shards as u64);
    let partials: Vec<Vec<BlockStats>> = (0..shards as u64)
        .map(|s| {
            let lo = (s * per_shard).min(blocks);
            let hi = ((s + 1) * per_shard).min(blocks);
            (lo..hi).map(|b| mc_block(params, pt, n, seed, b)).collect()
        })
        .collect();
    Ok(merge_blocks(partials.into_iter().flatten()).finish(seed))
}
