//! Seeded generation of simulated trial outcomes.
//!
//! Replicates are produced in blocks of [`SIM_BLOCK`]. Block `b` draws from
//! xoshiro256++ seeded (through `seed_from_u64`) with
//! [`block_seed`]`(seed, b)`; each basket's count is the inverse binomial CDF
//! at `u = (next_u64 >> 11) * 2^-53`, baskets in index order within a
//! replicate. The data therefore depend only on the seed, the sample sizes
//! and the true rates, so every design sees the same data sets.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use super::Scenario;
use crate::design::TrialConfig;
use crate::error::{domain, Result};
use crate::numerics::ln_choose;

/// Replicates per independently seeded block.
pub const SIM_BLOCK: usize = 1000;

/// Seed of block `block`, a SplitMix64 step away from `seed`.
pub fn block_seed(seed: u64, block: u64) -> u64 {
    let mut z = seed.wrapping_add(block.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Binomial CDF, capped at one and with the last entry pinned to one.
fn binomial_cdf(n: u32, p: f64) -> Vec<f64> {
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = (0..=n)
        .map(|r| {
            acc += (ln_choose(n, r) + r as f64 * lp + (n - r) as f64 * lq).exp();
            acc.min(1.0)
        })
        .collect();
    cdf[n as usize] = 1.0;
    cdf
}

/// Simulated response counts for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub scenario: Scenario,
    pub n_sims: usize,
    pub seed: u64,
    k: usize,
    counts: Vec<u32>,
}

impl SimulatedData {
    pub fn generate(
        config: &TrialConfig,
        scenario: &Scenario,
        n_sims: usize,
        seed: u64,
    ) -> Result<Self> {
        scenario.check(config)?;
        if n_sims == 0 {
            return Err(domain("number of simulations must be positive"));
        }
        let k = config.k();
        let cdfs: Vec<Vec<f64>> = config
            .sample_sizes()
            .iter()
            .zip(&scenario.true_rates)
            .map(|(&n, &p)| binomial_cdf(n, p))
            .collect();
        let mut counts = vec![0u32; n_sims * k];
        counts
            .par_chunks_mut(SIM_BLOCK * k)
            .enumerate()
            .for_each(|(block, chunk)| {
                let mut rng = Xoshiro256PlusPlus::seed_from_u64(block_seed(seed, block as u64));
                for replicate in chunk.chunks_mut(k) {
                    for (r, cdf) in replicate.iter_mut().zip(&cdfs) {
                        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                        *r = cdf.partition_point(|&c| c <= u) as u32;
                    }
                }
            });
        Ok(Self {
            scenario: scenario.clone(),
            n_sims,
            seed,
            k,
            counts,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn replicate(&self, i: usize) -> &[u32] {
        &self.counts[i * self.k..(i + 1) * self.k]
    }

    pub fn replicates(&self) -> impl Iterator<Item = &[u32]> {
        self.counts.chunks(self.k)
    }
}
