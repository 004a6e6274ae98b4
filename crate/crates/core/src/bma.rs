//! Bayesian model averaging over partitions of the baskets.
//!
//! Every partition is a model in which baskets of one cluster share a
//! response rate with a conjugate beta prior. Model priors are
//! proportional to `exp(D * psi)` for a model with `D` clusters.

use crate::design::{ResponseVector, TrialConfig};
use crate::error::{domain, usage, Result};
use crate::numerics::{beta_tail, ln_beta, log_sum_exp, upper_tail_unchecked, BetaShape};

/// Largest number of baskets for which partitions are enumerated.
pub const MAX_BMA_BASKETS: usize = 8;

/// One set partition, as a restricted growth string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionModel {
    /// Cluster label per basket; labels first appear in increasing order.
    pub cluster_of: Vec<usize>,
    /// Number of distinct clusters (response rates).
    pub d_clusters: usize,
}

impl PartitionModel {
    /// Bit masks of the baskets in each cluster, in label order.
    pub fn cluster_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.d_clusters];
        for (k, &c) in self.cluster_of.iter().enumerate() {
            masks[c] |= 1 << k;
        }
        masks
    }
}

/// All partitions of `k` baskets in lexicographic order of their labels.
pub fn enumerate_partitions(k: usize) -> Result<Vec<PartitionModel>> {
    if !(2..=MAX_BMA_BASKETS).contains(&k) {
        return Err(usage(format!(
            "model averaging supports 2 to {MAX_BMA_BASKETS} baskets, got {k}"
        )));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; k];
    fn grow(pos: usize, max_label: usize, labels: &mut [usize], out: &mut Vec<PartitionModel>) {
        if pos == labels.len() {
            out.push(PartitionModel {
                cluster_of: labels.to_vec(),
                d_clusters: max_label + 1,
            });
            return;
        }
        for label in 0..=max_label + 1 {
            labels[pos] = label;
            grow(pos + 1, max_label.max(label), labels, out);
        }
    }
    grow(1, 0, &mut labels, &mut out);
    Ok(out)
}

/// Posterior over partition models for one data set.
#[derive(Debug, Clone)]
pub struct BmaPosterior {
    pub models: Vec<PartitionModel>,
    /// Normalised log posterior model probabilities.
    pub model_log_weights: Vec<f64>,
    /// Pooled posterior per cluster, indexed like `models[j].cluster_masks()`.
    pub per_model_cluster_shapes: Vec<Vec<BetaShape>>,
}

fn common_prior(config: &TrialConfig) -> Result<BetaShape> {
    let prior = config.priors()[0];
    if config.priors().iter().any(|p| p != &prior) {
        return Err(usage(
            "model averaging needs one common beta prior for all baskets",
        ));
    }
    Ok(prior)
}

fn pooled_shape(config: &TrialConfig, counts: &[u32], mask: u32, prior: &BetaShape) -> BetaShape {
    let n = config.sample_sizes();
    let (mut succ, mut fail) = (0u32, 0u32);
    for k in (0..config.k()).filter(|k| mask >> k & 1 == 1) {
        succ += counts[k];
        fail += n[k] - counts[k];
    }
    BetaShape::new_unchecked(prior.alpha() + succ as f64, prior.beta() + fail as f64)
}

pub fn bma_posterior(config: &TrialConfig, r: &ResponseVector, psi: f64) -> Result<BmaPosterior> {
    config.validate_responses(r)?;
    if !psi.is_finite() {
        return Err(domain(format!("psi must be finite, got {psi}")));
    }
    let prior = common_prior(config)?;
    let ln_b0 = ln_beta(prior.alpha(), prior.beta());
    let models = enumerate_partitions(config.k())?;
    let mut log_weights = Vec::with_capacity(models.len());
    let mut shapes = Vec::with_capacity(models.len());
    for m in &models {
        let cluster_shapes: Vec<BetaShape> = m
            .cluster_masks()
            .into_iter()
            .map(|mask| pooled_shape(config, r.counts(), mask, &prior))
            .collect();
        // Binomial coefficients are common to all models and dropped.
        let log_marginal: f64 = cluster_shapes
            .iter()
            .map(|s| ln_beta(s.alpha(), s.beta()) - ln_b0)
            .sum();
        log_weights.push(m.d_clusters as f64 * psi + log_marginal);
        shapes.push(cluster_shapes);
    }
    let norm = log_sum_exp(&log_weights);
    for lw in &mut log_weights {
        *lw -= norm;
    }
    Ok(BmaPosterior {
        models,
        model_log_weights: log_weights,
        per_model_cluster_shapes: shapes,
    })
}

/// Model-averaged `P(p_k > p0 | data)`.
pub fn bma_basket_tail(bp: &BmaPosterior, k: usize, p0: f64) -> Result<f64> {
    let k_baskets = bp.models.first().map_or(0, |m| m.cluster_of.len());
    if k >= k_baskets {
        return Err(domain(format!("basket index {k} out of range")));
    }
    let mut acc = 0.0;
    for ((m, lw), shapes) in bp
        .models
        .iter()
        .zip(&bp.model_log_weights)
        .zip(&bp.per_model_cluster_shapes)
    {
        acc += lw.exp() * beta_tail(p0, &shapes[m.cluster_of[k]])?;
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// Model-averaged posterior means per basket.
pub fn bma_posterior_means(bp: &BmaPosterior) -> Vec<f64> {
    let k_baskets = bp.models.first().map_or(0, |m| m.cluster_of.len());
    (0..k_baskets)
        .map(|k| {
            bp.models
                .iter()
                .zip(&bp.model_log_weights)
                .zip(&bp.per_model_cluster_shapes)
                .map(|((m, lw), s)| lw.exp() * s[m.cluster_of[k]].mean())
                .sum()
        })
        .collect()
}

/// Precomputed partition structure for repeated evaluation. Cluster
/// statistics are computed once per subset of baskets and shared by all
/// models containing that subset.
#[derive(Debug, Clone)]
pub(crate) struct BmaModelSpace {
    k: usize,
    prior: BetaShape,
    ln_b0: f64,
    d_clusters: Vec<f64>,
    cluster_masks: Vec<Vec<u32>>,
    /// `basket_mask[j][k]`: the cluster containing basket `k` in model `j`.
    basket_mask: Vec<Vec<u32>>,
}

impl BmaModelSpace {
    pub(crate) fn new(config: &TrialConfig) -> Result<Self> {
        let prior = common_prior(config)?;
        let models = enumerate_partitions(config.k())?;
        let cluster_masks: Vec<Vec<u32>> = models.iter().map(|m| m.cluster_masks()).collect();
        let basket_mask = models
            .iter()
            .zip(&cluster_masks)
            .map(|(m, masks)| m.cluster_of.iter().map(|&c| masks[c]).collect())
            .collect();
        Ok(Self {
            k: config.k(),
            prior,
            ln_b0: ln_beta(prior.alpha(), prior.beta()),
            d_clusters: models.iter().map(|m| m.d_clusters as f64).collect(),
            cluster_masks,
            basket_mask,
        })
    }

    /// Writes model-averaged tails and posterior means for `counts`.
    pub(crate) fn evaluate(
        &self,
        config: &TrialConfig,
        counts: &[u32],
        psi: f64,
        p0: f64,
        tails: &mut [f64],
        means: &mut [f64],
    ) {
        let subsets = 1usize << self.k;
        let mut log_marginal = vec![0.0; subsets];
        let mut tail = vec![0.0; subsets];
        let mut mean = vec![0.0; subsets];
        for mask in 1..subsets {
            let s = pooled_shape(config, counts, mask as u32, &self.prior);
            log_marginal[mask] = ln_beta(s.alpha(), s.beta()) - self.ln_b0;
            tail[mask] = upper_tail_unchecked(p0, &s);
            mean[mask] = s.mean();
        }
        let log_w: Vec<f64> = self
            .cluster_masks
            .iter()
            .zip(&self.d_clusters)
            .map(|(masks, d)| {
                d * psi + masks.iter().map(|&m| log_marginal[m as usize]).sum::<f64>()
            })
            .collect();
        let norm = log_sum_exp(&log_w);
        tails.iter_mut().for_each(|t| *t = 0.0);
        means.iter_mut().for_each(|m| *m = 0.0);
        for (lw, masks) in log_w.iter().zip(&self.basket_mask) {
            let w = (lw - norm).exp();
            for (k, &m) in masks.iter().enumerate() {
                tails[k] += w * tail[m as usize];
                means[k] += w * mean[m as usize];
            }
        }
        tails.iter_mut().for_each(|t| *t = t.clamp(0.0, 1.0));
    }
}
