//! Threshold calibration under the global null.

use serde::{Deserialize, Serialize};

use crate::design::{DesignSpec, TrialConfig};
use crate::error::{domain, Error, Result};
use crate::oc::{DesignContext, DesignEvaluator, Method, Scenario, SimulatedData};

/// Lowest threshold considered.
pub const LAMBDA_MIN: f64 = 0.5;
/// Highest threshold considered.
pub const LAMBDA_MAX: f64 = 1.0 - 1e-9;
/// Spacing of the threshold grid.
pub const LAMBDA_STEP: f64 = 1e-6;

const GRID_START: u64 = 500_000;
/// Grid points below one; index `GRID_POINTS` stands for [`LAMBDA_MAX`].
const GRID_POINTS: u64 = 500_000;

/// Default number of decimal digits of the returned threshold.
pub const DEFAULT_LAMBDA_DIGITS: u32 = 6;

fn grid_lambda(i: u64) -> f64 {
    if i >= GRID_POINTS {
        LAMBDA_MAX
    } else {
        (GRID_START + i) as f64 / 1e6
    }
}

/// How operating characteristics are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Simulated { n_sims: usize, seed: u64 },
}

impl Engine {
    pub fn method(&self) -> Method {
        match self {
            Engine::Exact => Method::Exact,
            Engine::Simulated { .. } => Method::Simulated,
        }
    }
}

/// Error rate to protect and the resolution of the returned threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub alpha: f64,
    /// The threshold is rounded up to this many decimal digits (1 to 6).
    pub lambda_digits: u32,
}

impl CalibrationTarget {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            lambda_digits: DEFAULT_LAMBDA_DIGITS,
        }
    }

    pub fn with_lambda_digits(self, lambda_digits: u32) -> Self {
        Self {
            lambda_digits,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(domain(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(1..=DEFAULT_LAMBDA_DIGITS).contains(&self.lambda_digits) {
            return Err(domain(format!(
                "lambda digits must lie in 1..=6, got {}",
                self.lambda_digits
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub lambda: f64,
    pub achieved_fwer: f64,
    pub alpha_target: f64,
    pub method: Method,
    /// Monte Carlo standard error of `achieved_fwer` (simulation only).
    pub fwer_mc_se: Option<f64>,
}

/// Smallest threshold on the `1e-6` grid over `[0.5, 1 - 1e-9]` whose
/// global-null FWER does not exceed `alpha`.
pub fn calibrate_lambda(
    config: &TrialConfig,
    spec: &DesignSpec,
    alpha: f64,
    engine: Engine,
) -> Result<CalibrationResult> {
    let ev = DesignEvaluator::new(DesignContext::new(config.clone()), *spec)?;
    calibrate_with(&ev, CalibrationTarget::new(alpha), engine, None)
}

/// Calibration with an existing evaluator; `null_data` supplies pregenerated
/// global-null replicates for the simulated engine.
///
/// With fewer than six digits the smallest feasible grid threshold is
/// rounded up to the coarser grid, which keeps the FWER within `alpha`.
pub fn calibrate_with(
    ev: &DesignEvaluator,
    target: CalibrationTarget,
    engine: Engine,
    null_data: Option<&SimulatedData>,
) -> Result<CalibrationResult> {
    target.validate()?;
    let alpha = target.alpha;
    let config = ev.context().config();
    let profile = match engine {
        Engine::Exact => ev.exact_null_profile()?,
        Engine::Simulated { n_sims, seed } => match null_data {
            Some(d) => ev.simulated_null_profile(d)?,
            None => {
                let d =
                    SimulatedData::generate(config, &Scenario::global_null(config), n_sims, seed)?;
                ev.simulated_null_profile(&d)?
            }
        },
    };
    let rule = ev.decision_rule();
    let fwer = |i: u64| profile.fwer(grid_lambda(i), rule);

    let top = fwer(GRID_POINTS);
    if top > alpha {
        return Err(Error::CalibrationInfeasible { fwer: top, alpha });
    }
    // FWER is nonincreasing along the grid; find the first feasible index.
    let (mut lo, mut hi) = (0u64, GRID_POINTS);
    if fwer(lo) <= alpha {
        hi = lo;
    } else {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fwer(mid) <= alpha {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let step = 10u64.pow(DEFAULT_LAMBDA_DIGITS - target.lambda_digits);
    let hi = ((GRID_START + hi).div_ceil(step) * step - GRID_START).min(GRID_POINTS);
    let achieved = fwer(hi);
    let n = profile.max_tails.len() as f64;
    Ok(CalibrationResult {
        lambda: grid_lambda(hi),
        achieved_fwer: achieved,
        alpha_target: alpha,
        method: engine.method(),
        fwer_mc_se: profile
            .probs
            .is_none()
            .then(|| (achieved * (1.0 - achieved) / n).sqrt()),
    })
}
