//! Operating characteristics: rejection rates, FWER, ECD and mean posterior
//! means, either by enumerating every outcome or by seeded simulation.

mod context;
mod evaluator;
mod simulate;

use serde::{Deserialize, Serialize};

use crate::design::{DesignSpec, TrialConfig};
use crate::error::{domain, Result};

pub use context::{DesignContext, MAX_EXACT_OUTCOMES};
pub use evaluator::DesignEvaluator;
pub use simulate::{block_seed, SimulatedData, SIM_BLOCK};

/// True response rates under which a design is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub true_rates: Vec<f64>,
}

impl Scenario {
    pub fn new(name: impl Into<String>, true_rates: Vec<f64>) -> Result<Self> {
        let s = Self {
            name: name.into(),
            true_rates,
        };
        if let Some(p) = s.true_rates.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(domain(format!(
                "scenario '{}': rate {p} outside (0, 1)",
                s.name
            )));
        }
        Ok(s)
    }

    /// All baskets at the null rate.
    pub fn global_null(config: &TrialConfig) -> Self {
        Self {
            name: "Global Null".into(),
            true_rates: vec![config.null_rate(); config.k()],
        }
    }

    pub(crate) fn check(&self, config: &TrialConfig) -> Result<()> {
        if self.true_rates.len() != config.k() {
            return Err(domain(format!(
                "scenario '{}' has {} rates, trial has {} baskets",
                self.name,
                self.true_rates.len(),
                config.k()
            )));
        }
        Scenario::new(self.name.clone(), self.true_rates.clone()).map(|_| ())
    }

    /// Baskets whose true rate does not exceed `p0`.
    pub fn null_baskets(&self, p0: f64) -> Vec<bool> {
        self.true_rates.iter().map(|&p| p <= p0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Simulated,
}

/// Monte Carlo standard errors of the simulated statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McStandardErrors {
    pub rejection_rates: Vec<f64>,
    pub fwer: Option<f64>,
    pub ecd: f64,
    pub mean_posterior_means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcResult {
    pub scenario: String,
    pub lambda: f64,
    pub rejection_rates: Vec<f64>,
    /// Absent when no basket is truly null.
    pub fwer: Option<f64>,
    pub ecd: f64,
    pub mean_posterior_means: Vec<f64>,
    pub method: Method,
    pub n_sims: Option<usize>,
    pub seed: Option<u64>,
    pub mc_se: Option<McStandardErrors>,
}

/// Expected number of correct decisions: rejections of active baskets plus
/// non-rejections of inactive ones.
pub fn ecd(rejection_rates: &[f64], scenario: &Scenario, p0: f64) -> Result<f64> {
    if rejection_rates.len() != scenario.true_rates.len() {
        return Err(domain(format!(
            "{} rejection rates for {} baskets",
            rejection_rates.len(),
            scenario.true_rates.len()
        )));
    }
    Ok(ecd_unchecked(rejection_rates, &scenario.true_rates, p0))
}

pub(crate) fn ecd_unchecked(rates: &[f64], true_rates: &[f64], p0: f64) -> f64 {
    rates
        .iter()
        .zip(true_rates)
        .map(|(&r, &p)| if p > p0 { r } else { 1.0 - r })
        .sum()
}

/// Exact operating characteristics by full enumeration of the outcome space.
///
/// JSD-Global and MML need an explicit opt-in through
/// [`DesignEvaluator::allow_costly_exact`].
pub fn exact_oc(
    config: &TrialConfig,
    spec: &DesignSpec,
    scenario: &Scenario,
    lambda: f64,
) -> Result<OcResult> {
    DesignEvaluator::new(DesignContext::new(config.clone()), *spec)?.exact_oc(scenario, lambda)
}

/// Simulated operating characteristics from `n_sims` seeded replicates.
pub fn simulate_oc(
    config: &TrialConfig,
    spec: &DesignSpec,
    scenario: &Scenario,
    lambda: f64,
    n_sims: usize,
    seed: u64,
) -> Result<OcResult> {
    let data = SimulatedData::generate(config, scenario, n_sims, seed)?;
    DesignEvaluator::new(DesignContext::new(config.clone()), *spec)?.simulated_oc(&data, lambda)
}
