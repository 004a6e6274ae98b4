//! Sharing weights between baskets.
//!
//! `w[k][i]` is the fraction of basket `i`'s data counted towards basket
//! `k`'s posterior. Own data always enter with weight one.

mod mml;

use std::fmt;

use crate::design::{DesignSpec, ResponseVector, TrialConfig};
use crate::error::{domain, usage, Result};
use crate::numerics::{generalized_jsd, BetaShape};

pub use mml::{mml_log_likelihood, mml_weights, mml_weights_with};

/// Square matrix of sharing weights in `[0, 1]` with unit diagonal.
#[derive(Clone, PartialEq)]
pub struct WeightMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    pub fn identity(k: usize) -> Self {
        Self::from_fn(k, |_, _| 0.0)
    }

    pub fn ones(k: usize) -> Self {
        Self::from_fn(k, |_, _| 1.0)
    }

    /// Off-diagonal entries from `f(row, col)`; the diagonal is set to one.
    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(k * k);
        for row in 0..k {
            for col in 0..k {
                entries.push(if row == col { 1.0 } else { f(row, col) });
            }
        }
        Self { k, entries }
    }

    /// Builds a matrix from rows, validating the invariants.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for (row, values) in rows.iter().enumerate() {
            if values.len() != k {
                return Err(domain("weight matrix must be square"));
            }
            for (col, &w) in values.iter().enumerate() {
                if !(0.0..=1.0).contains(&w) {
                    return Err(domain(format!(
                        "weight {w} at ({row}, {col}) outside [0, 1]"
                    )));
                }
                if row == col && w != 1.0 {
                    return Err(domain(format!(
                        "diagonal weight at {row} must be 1, got {w}"
                    )));
                }
                entries.push(w);
            }
        }
        Ok(Self { k, entries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.k + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.k..(row + 1) * self.k]
    }

    /// Multiplies every off-diagonal entry by `factor`.
    pub fn scale_off_diagonal(&mut self, factor: f64) {
        for row in 0..self.k {
            for col in 0..self.k {
                if row != col {
                    self.entries[row * self.k + col] *= factor;
                }
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.k).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }
}

impl fmt::Debug for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.k).map(|r| self.row(r)))
            .finish()
    }
}

/// Weight implied by a pairwise JSD value (base-2 logs).
#[inline]
pub fn jsd_weight_from_divergence(jsd: f64, epsilon: f64, tau: f64) -> f64 {
    let w = (1.0 - jsd.clamp(0.0, 1.0)).powf(epsilon);
    if w > tau {
        w
    } else {
        0.0
    }
}

/// Pairwise JSD between two beta distributions with base-2 logarithms.
pub fn pairwise_jsd(shape_k: &BetaShape, shape_i: &BetaShape) -> Result<f64> {
    generalized_jsd(&sorted_shapes(vec![*shape_k, *shape_i]), 2.0)
}

/// Orders shapes by their bit keys so that divergences are evaluated in one
/// fixed order regardless of basket labels.
pub(crate) fn sorted_shapes(mut shapes: Vec<BetaShape>) -> Vec<BetaShape> {
    shapes.sort_by_key(BetaShape::key);
    shapes
}

/// Fujikawa's weight `(1 - JSD)^epsilon`, truncated to zero at or below `tau`.
pub fn jsd_pairwise_weight(
    shape_k: &BetaShape,
    shape_i: &BetaShape,
    epsilon: f64,
    tau: f64,
) -> Result<f64> {
    if !(epsilon > 0.0) || !(0.0..=1.0).contains(&tau) {
        return Err(domain(format!(
            "need epsilon > 0 and tau in [0, 1], got ({epsilon}, {tau})"
        )));
    }
    Ok(jsd_weight_from_divergence(
        pairwise_jsd(shape_k, shape_i)?,
        epsilon,
        tau,
    ))
}

/// Calibrated power prior weight from the scaled rate difference.
///
/// Evaluates `1 / (1 + e^a S^b)`, which equals the logistic form in
/// `log S` and is exactly one when the rates agree.
pub fn cpp_pairwise_weight(r_k: u32, n_k: u32, r_i: u32, n_i: u32, a: f64, b: f64) -> Result<f64> {
    if n_k == 0 || n_i == 0 || r_k > n_k || r_i > n_i {
        return Err(domain(format!("invalid counts ({r_k}/{n_k}, {r_i}/{n_i})")));
    }
    if !(b > 0.0) || !a.is_finite() {
        return Err(domain(format!("need finite a and b > 0, got ({a}, {b})")));
    }
    Ok(cpp_weight_unchecked(r_k, n_k, r_i, n_i, a, b))
}

#[inline]
pub(crate) fn cpp_weight_unchecked(r_k: u32, n_k: u32, r_i: u32, n_i: u32, a: f64, b: f64) -> f64 {
    let ks = (r_k as f64 / n_k as f64 - r_i as f64 / n_i as f64).abs();
    if ks == 0.0 {
        return 1.0;
    }
    let scaled = (n_k.max(n_i) as f64).powf(0.25) * ks;
    1.0 / (1.0 + a.exp() * scaled.powf(b))
}

/// Symmetric matrix of pairwise weights for the pairwise families.
///
/// JSD-based families compare the individual (unshared) posteriors.
pub fn pairwise_weight_matrix(
    config: &TrialConfig,
    r: &ResponseVector,
    spec: &DesignSpec,
) -> Result<WeightMatrix> {
    config.validate_responses(r)?;
    spec.validate()?;
    let k = config.k();
    let counts = r.counts();
    let n = config.sample_sizes();
    let mut values = vec![0.0; k * k];
    for row in 0..k {
        for col in (row + 1)..k {
            let w = match *spec {
                DesignSpec::Fujikawa { epsilon, tau }
                | DesignSpec::JsdGlobal { epsilon, tau, .. } => jsd_pairwise_weight(
                    &config.individual_posterior(row, counts[row]),
                    &config.individual_posterior(col, counts[col]),
                    epsilon,
                    tau,
                )?,
                DesignSpec::Cpp { a, b }
                | DesignSpec::CppGlobal { a, b, .. }
                | DesignSpec::CppNex { a, b, .. } => {
                    cpp_weight_unchecked(counts[row], n[row], counts[col], n[col], a, b)
                }
                DesignSpec::Mml | DesignSpec::Bma { .. } => {
                    return Err(usage(format!(
                        "{} does not use pairwise weights",
                        spec.family()
                    )))
                }
            };
            values[row * k + col] = w;
            values[col * k + row] = w;
        }
    }
    Ok(WeightMatrix::from_fn(k, |i, j| values[i * k + j]))
}

/// Global weight `(1 - JSD_K)^epsilon_star` from the generalised JSD of all
/// individual posteriors with base-K logarithms.
pub fn global_jsd_weight(
    config: &TrialConfig,
    r: &ResponseVector,
    epsilon_star: f64,
) -> Result<f64> {
    config.validate_responses(r)?;
    if !(epsilon_star > 0.0) {
        return Err(domain(format!(
            "epsilon_star must be positive, got {epsilon_star}"
        )));
    }
    let shapes = r
        .counts()
        .iter()
        .enumerate()
        .map(|(k, &rk)| config.individual_posterior(k, rk))
        .collect();
    let jsd = generalized_jsd(&sorted_shapes(shapes), config.k() as f64)?;
    Ok(global_weight_from_divergence(jsd, epsilon_star))
}

#[inline]
pub(crate) fn global_weight_from_divergence(jsd: f64, epsilon_star: f64) -> f64 {
    (1.0 - jsd.clamp(0.0, 1.0)).powf(epsilon_star)
}

/// Heterogeneity-based global weight from the gaps between sorted response
/// rates, clamped to `[0, 1]` before the power is applied.
pub fn heterogeneity_h(config: &TrialConfig, r: &ResponseVector, epsilon_star: f64) -> Result<f64> {
    config.validate_responses(r)?;
    if !(epsilon_star > 0.0) {
        return Err(domain(format!(
            "epsilon_star must be positive, got {epsilon_star}"
        )));
    }
    let rates: Vec<f64> = r
        .counts()
        .iter()
        .zip(config.sample_sizes())
        .map(|(&rk, &nk)| rk as f64 / nk as f64)
        .collect();
    Ok(heterogeneity_from_rates(&rates, epsilon_star))
}

pub(crate) fn heterogeneity_from_rates(rates: &[f64], epsilon_star: f64) -> f64 {
    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let target = 1.0 / (k as f64 - 1.0);
    let inner: f64 = sorted
        .windows(2)
        .map(|w| (w[1] - w[0] - target).powi(2))
        .sum();
    // The gaps telescope to the range of the rates.
    let total_gap = sorted[k - 1] - sorted[0];
    let base = (1.0 - total_gap * 10f64.powf(-inner)).clamp(0.0, 1.0);
    base.powf(epsilon_star)
}

/// Weight matrix actually used by a design, including any global factor.
pub fn effective_weight_matrix(
    config: &TrialConfig,
    r: &ResponseVector,
    spec: &DesignSpec,
) -> Result<WeightMatrix> {
    spec.validate()?;
    match *spec {
        DesignSpec::Fujikawa { .. } | DesignSpec::Cpp { .. } => {
            pairwise_weight_matrix(config, r, spec)
        }
        DesignSpec::CppGlobal { epsilon_star, .. } => {
            let mut w = pairwise_weight_matrix(config, r, spec)?;
            w.scale_off_diagonal(heterogeneity_h(config, r, epsilon_star)?);
            Ok(w)
        }
        DesignSpec::CppNex { omega_star, .. } => {
            let mut w = pairwise_weight_matrix(config, r, spec)?;
            w.scale_off_diagonal(omega_star);
            Ok(w)
        }
        DesignSpec::JsdGlobal { epsilon_star, .. } => {
            let mut w = pairwise_weight_matrix(config, r, spec)?;
            w.scale_off_diagonal(global_jsd_weight(config, r, epsilon_star)?);
            Ok(w)
        }
        DesignSpec::Mml => {
            config.validate_responses(r)?;
            let rows = (0..config.k())
                .map(|k| mml_weights(config, r, k))
                .collect::<Result<Vec<_>>>()?;
            WeightMatrix::from_rows(&rows)
        }
        DesignSpec::Bma { .. } => Err(usage(
            "model averaging has no weight matrix; use the bma module",
        )),
    }
}
