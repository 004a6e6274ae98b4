//! Per-trial state shared by every design evaluated on the same trial:
//! the outcome space and divergence caches that do not depend on tuning
//! parameters.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;

use crate::design::TrialConfig;
use crate::error::{Error, Result};
use crate::numerics::{generalized_jsd, BetaShape};
use crate::weights::{pairwise_jsd, sorted_shapes};

/// Largest outcome space the exact engine enumerates.
pub const MAX_EXACT_OUTCOMES: u128 = 10_000_000;

/// Shared state for one trial configuration.
#[derive(Debug)]
pub struct DesignContext {
    config: TrialConfig,
    canon: Canonicalizer,
    space: OnceLock<Result<Arc<OutcomeSpace>>>,
    pair_jsd: OnceLock<Result<Arc<PairTable>>>,
    global_jsd: RwLock<HashMap<Vec<(u64, u64)>, f64>>,
}

impl DesignContext {
    pub fn new(config: TrialConfig) -> Arc<Self> {
        Arc::new(Self {
            canon: Canonicalizer::new(&config),
            config,
            space: OnceLock::new(),
            pair_jsd: OnceLock::new(),
            global_jsd: RwLock::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &TrialConfig {
        &self.config
    }

    pub(crate) fn canonicalizer(&self) -> &Canonicalizer {
        &self.canon
    }

    pub(crate) fn outcome_space(&self) -> Result<Arc<OutcomeSpace>> {
        self.space
            .get_or_init(|| OutcomeSpace::new(&self.config, &self.canon).map(Arc::new))
            .clone()
    }

    /// Pairwise JSD between individual posteriors for every pair of baskets
    /// and every pair of counts.
    pub(crate) fn pair_table(&self) -> Result<Arc<PairTable>> {
        self.pair_jsd
            .get_or_init(|| PairTable::new(&self.config).map(Arc::new))
            .clone()
    }

    /// Generalised JSD (base K) of the individual posteriors for `counts`.
    pub(crate) fn global_jsd(&self, counts: &[u32]) -> Result<f64> {
        let shapes = sorted_shapes(
            counts
                .iter()
                .enumerate()
                .map(|(k, &r)| self.config.individual_posterior(k, r))
                .collect(),
        );
        let key: Vec<(u64, u64)> = shapes.iter().map(BetaShape::key).collect();
        if let Some(&v) = self.global_jsd.read().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let v = generalized_jsd(&shapes, self.config.k() as f64)?;
        self.global_jsd.write().expect("cache lock").insert(key, v);
        Ok(v)
    }
}

/// Maps outcomes to a representative whose summary can be reused.
///
/// With equal sample sizes and priors every design treats the baskets
/// symmetrically, so an outcome and any permutation of it share one summary:
/// the sorted outcome is computed once and read back through the positions
/// of each basket's count in the sorted vector.
#[derive(Debug, Clone)]
pub(crate) struct Canonicalizer {
    exchangeable: bool,
    radix: Vec<u128>,
}

impl Canonicalizer {
    fn new(config: &TrialConfig) -> Self {
        Self {
            exchangeable: config.is_exchangeable(),
            radix: config
                .sample_sizes()
                .iter()
                .map(|&n| n as u128 + 1)
                .collect(),
        }
    }

    /// Mixed-radix key, first basket most significant.
    pub(crate) fn key(&self, counts: &[u32]) -> u128 {
        counts
            .iter()
            .zip(&self.radix)
            .fold(0u128, |acc, (&r, &b)| acc * b + r as u128)
    }

    /// Writes the representative outcome to `rep` and, for each basket, the
    /// slot of `rep` holding its summary to `slot`; returns the key of `rep`.
    pub(crate) fn canonicalize(&self, counts: &[u32], rep: &mut [u32], slot: &mut [usize]) -> u128 {
        rep.copy_from_slice(counts);
        if self.exchangeable {
            rep.sort_unstable();
            for (s, r) in slot.iter_mut().zip(counts) {
                *s = rep.partition_point(|v| v < r);
            }
        } else {
            for (k, s) in slot.iter_mut().enumerate() {
                *s = k;
            }
        }
        self.key(rep)
    }
}

/// Enumerated outcome space with its representatives.
#[derive(Debug)]
pub(crate) struct OutcomeSpace {
    pub(crate) k: usize,
    pub(crate) radix: Vec<u32>,
    pub(crate) total: usize,
    /// Representative outcomes, flattened.
    pub(crate) reps: Vec<u32>,
    /// Key of a representative to its index; absent when every outcome is
    /// its own representative and the key is the index.
    rep_index: Option<Vec<u32>>,
}

impl OutcomeSpace {
    fn new(config: &TrialConfig, canon: &Canonicalizer) -> Result<Self> {
        let total = config.outcome_count();
        if total > MAX_EXACT_OUTCOMES {
            return Err(Error::Capacity(format!(
                "{total} outcomes exceed the exact limit of {MAX_EXACT_OUTCOMES}; use simulation"
            )));
        }
        let total = total as usize;
        let k = config.k();
        let radix: Vec<u32> = config.sample_sizes().iter().map(|&n| n + 1).collect();
        let mut reps = Vec::new();
        let rep_index = if canon.exchangeable {
            let mut index = vec![u32::MAX; total];
            let mut r = vec![0u32; k];
            for (key, slot) in index.iter_mut().enumerate() {
                if r.windows(2).all(|w| w[0] <= w[1]) {
                    *slot = (reps.len() / k) as u32;
                    reps.extend_from_slice(&r);
                }
                debug_assert_eq!(canon.key(&r), key as u128);
                advance(&mut r, &radix);
            }
            Some(index)
        } else {
            None
        };
        Ok(Self {
            k,
            radix,
            total,
            reps,
            rep_index,
        })
    }

    pub(crate) fn rep_count(&self) -> usize {
        if self.rep_index.is_some() {
            self.reps.len() / self.k
        } else {
            self.total
        }
    }

    /// Representative `i`, written to `out`.
    pub(crate) fn representative(&self, i: usize, out: &mut [u32]) {
        if self.rep_index.is_some() {
            out.copy_from_slice(&self.reps[i * self.k..(i + 1) * self.k]);
        } else {
            let mut rest = i;
            for j in (0..self.k).rev() {
                out[j] = (rest % self.radix[j] as usize) as u32;
                rest /= self.radix[j] as usize;
            }
        }
    }

    pub(crate) fn rep_of_key(&self, key: u128) -> usize {
        match &self.rep_index {
            Some(index) => index[key as usize] as usize,
            None => key as usize,
        }
    }
}

/// Steps `r` to the next outcome in lexicographic order (last basket
/// fastest); wraps to all zeros after the last outcome.
pub(crate) fn advance(r: &mut [u32], radix: &[u32]) {
    for j in (0..r.len()).rev() {
        r[j] += 1;
        if r[j] < radix[j] {
            return;
        }
        r[j] = 0;
    }
}

/// Pairwise JSD values indexed by basket pair and counts.
#[derive(Debug)]
pub(crate) struct PairTable {
    k: usize,
    offsets: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

type PairKey = ((u64, u64), (u64, u64));

impl PairTable {
    fn new(config: &TrialConfig) -> Result<Self> {
        let k = config.k();
        let n = config.sample_sizes();
        let strides: Vec<usize> = n.iter().map(|&m| m as usize + 1).collect();
        let mut offsets = vec![0; k * k];
        let mut cells: Vec<PairKey> = Vec::new();
        for a in 0..k {
            for b in (a + 1)..k {
                offsets[a * k + b] = cells.len();
                for ra in 0..=n[a] {
                    for rb in 0..=n[b] {
                        let sa = config.individual_posterior(a, ra);
                        let sb = config.individual_posterior(b, rb);
                        let (x, y) = (sa.key(), sb.key());
                        cells.push(if x <= y { (x, y) } else { (y, x) });
                    }
                }
            }
        }
        let mut unique = cells.clone();
        unique.sort_unstable();
        unique.dedup();
        let shape =
            |(a, b): (u64, u64)| BetaShape::new_unchecked(f64::from_bits(a), f64::from_bits(b));
        let computed = unique
            .par_iter()
            .map(|&(x, y)| pairwise_jsd(&shape(x), &shape(y)))
            .collect::<Result<Vec<f64>>>()?;
        let lookup: HashMap<PairKey, f64> = unique.into_iter().zip(computed).collect();
        let values = cells.iter().map(|c| lookup[c]).collect();
        Ok(Self {
            k,
            offsets,
            strides,
            values,
        })
    }

    #[inline]
    pub(crate) fn get(&self, row: usize, col: usize, r_row: u32, r_col: u32) -> f64 {
        let (a, b, ra, rb) = if row < col {
            (row, col, r_row, r_col)
        } else {
            (col, row, r_col, r_row)
        };
        self.values[self.offsets[a * self.k + b] + ra as usize * self.strides[b] + rb as usize]
    }
}
