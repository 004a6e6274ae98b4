//! Tuning-parameter grid search by mean ECD over a scenario set.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::{calibrate_with, CalibrationResult, CalibrationTarget, Engine};
use crate::design::{DesignSpec, Family, TrialConfig};
use crate::error::{domain, Result};
use crate::oc::{DesignContext, DesignEvaluator, OcResult, Scenario, SimulatedData};

/// Values of one tuning parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }
}

/// Cartesian grid over the tuning parameters of one family. Axes follow the
/// order of [`Family::parameter_names`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningGrid {
    pub family: Family,
    pub axes: Vec<GridAxis>,
}

impl TuningGrid {
    pub fn new(family: Family, axes: Vec<GridAxis>) -> Result<Self> {
        let grid = Self { family, axes };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        if names != self.family.parameter_names() {
            return Err(domain(format!(
                "{} grid needs axes {:?} in that order, got {names:?}",
                self.family,
                self.family.parameter_names()
            )));
        }
        if let Some(a) = self.axes.iter().find(|a| a.values.is_empty()) {
            return Err(domain(format!("grid axis '{}' has no values", a.name)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every combination, first axis varying slowest.
    pub fn combinations(&self) -> Result<Vec<DesignSpec>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; self.axes.len()];
        loop {
            let values: Vec<f64> = self
                .axes
                .iter()
                .zip(&idx)
                .map(|(a, &i)| a.values[i])
                .collect();
            out.push(DesignSpec::from_parameters(self.family, &values)?);
            let mut j = self.axes.len();
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.axes[j].values.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

/// How designs are calibrated and evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSettings {
    pub target: CalibrationTarget,
    pub engine: Engine,
    /// Enumerate JSD-Global and MML exactly instead of refusing.
    pub allow_costly_exact: bool,
}

impl EvaluationSettings {
    pub fn new(alpha: f64, engine: Engine) -> Self {
        Self {
            target: CalibrationTarget::new(alpha),
            engine,
            allow_costly_exact: false,
        }
    }
}

/// Simulated replicates shared by every design evaluated on one trial, so
/// that all designs see the same data.
#[derive(Debug, Clone)]
pub struct SharedData {
    null: Option<SimulatedData>,
    scenarios: Vec<Option<SimulatedData>>,
}

impl SharedData {
    /// Generates global-null and per-scenario replicates for the simulated
    /// engine; empty for the exact engine. Every scenario uses `seed`.
    pub fn generate(config: &TrialConfig, scenarios: &[Scenario], engine: Engine) -> Result<Self> {
        match engine {
            Engine::Exact => {
                for s in scenarios {
                    s.check(config)?;
                }
                Ok(Self {
                    null: None,
                    scenarios: vec![None; scenarios.len()],
                })
            }
            Engine::Simulated { n_sims, seed } => {
                let null =
                    SimulatedData::generate(config, &Scenario::global_null(config), n_sims, seed)?;
                let scenarios = scenarios
                    .iter()
                    .map(|s| SimulatedData::generate(config, s, n_sims, seed).map(Some))
                    .collect::<Result<_>>()?;
                Ok(Self {
                    null: Some(null),
                    scenarios,
                })
            }
        }
    }
}

/// Calibration and per-scenario results of one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRun {
    pub spec: DesignSpec,
    pub calibration: CalibrationResult,
    pub results: Vec<OcResult>,
}

impl DesignRun {
    pub fn mean_ecd(&self) -> f64 {
        mean(self.results.iter().map(|r| r.ecd))
    }
}

fn mean(v: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = v.len() as f64;
    v.sum::<f64>() / n
}

/// Calibrates `spec` and evaluates it under every scenario at the
/// calibrated threshold.
pub fn run_design(
    ctx: &Arc<DesignContext>,
    spec: DesignSpec,
    scenarios: &[Scenario],
    settings: &EvaluationSettings,
    data: &SharedData,
) -> Result<DesignRun> {
    let ev =
        DesignEvaluator::new(ctx.clone(), spec)?.allow_costly_exact(settings.allow_costly_exact);
    let calibration = calibrate_with(&ev, settings.target, settings.engine, data.null.as_ref())?;
    let results = evaluate_at(&ev, scenarios, calibration.lambda, data)?;
    Ok(DesignRun {
        spec,
        calibration,
        results,
    })
}

/// Operating characteristics of `ev` under every scenario at `lambda`.
pub fn evaluate_at(
    ev: &DesignEvaluator,
    scenarios: &[Scenario],
    lambda: f64,
    data: &SharedData,
) -> Result<Vec<OcResult>> {
    if data.scenarios.len() != scenarios.len() {
        return Err(domain("shared data do not match the scenario list"));
    }
    scenarios
        .iter()
        .zip(&data.scenarios)
        .map(|(s, d)| match d {
            Some(d) => ev.simulated_oc(d, lambda),
            None => ev.exact_oc(s, lambda),
        })
        .collect()
}

/// Outcome of one grid combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningRecord {
    pub spec: DesignSpec,
    pub calibration: Option<CalibrationResult>,
    /// ECD per scenario, in scenario order.
    pub ecds: Vec<f64>,
    pub mean_ecd: Option<f64>,
    pub results: Vec<OcResult>,
    /// Why the combination could not be evaluated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningReport {
    pub family: Family,
    pub scenarios: Vec<String>,
    pub alpha: f64,
    pub records: Vec<TuningRecord>,
    /// Index of the record with the highest mean ECD; the first in grid
    /// order wins ties.
    pub winner: Option<usize>,
}

impl TuningReport {
    pub fn winner(&self) -> Option<&TuningRecord> {
        self.winner.map(|i| &self.records[i])
    }

    /// Winner when only the named scenarios count, using the stored ECDs.
    pub fn winner_over(&self, scenarios: &[&str]) -> Result<Option<usize>> {
        let cols = scenarios
            .iter()
            .map(|name| {
                self.scenarios
                    .iter()
                    .position(|s| s == name)
                    .ok_or_else(|| domain(format!("scenario '{name}' is not in the report")))
            })
            .collect::<Result<Vec<_>>>()?;
        if cols.is_empty() {
            return Err(domain("no scenarios selected"));
        }
        Ok(best(self.records.iter().map(|r| {
            r.mean_ecd.map(|_| mean(cols.iter().map(|&c| r.ecds[c])))
        })))
    }
}

fn best(scores: impl Iterator<Item = Option<f64>>) -> Option<usize> {
    let mut top: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        if let Some(s) = s {
            if top.is_none_or(|(_, t)| s > t) {
                top = Some((i, s));
            }
        }
    }
    top.map(|(i, _)| i)
}

/// Calibrates every combination of `grid` and ranks by mean ECD over
/// `scenarios`.
pub fn grid_search(
    config: &TrialConfig,
    grid: &TuningGrid,
    scenarios: &[Scenario],
    alpha: f64,
    engine: Engine,
) -> Result<TuningReport> {
    let ctx = DesignContext::new(config.clone());
    let data = SharedData::generate(config, scenarios, engine)?;
    grid_search_with(
        &ctx,
        grid,
        scenarios,
        &EvaluationSettings::new(alpha, engine),
        &data,
    )
}

/// Grid search on a shared context and shared simulated data.
pub fn grid_search_with(
    ctx: &Arc<DesignContext>,
    grid: &TuningGrid,
    scenarios: &[Scenario],
    settings: &EvaluationSettings,
    data: &SharedData,
) -> Result<TuningReport> {
    if scenarios.is_empty() {
        return Err(domain("grid search needs at least one scenario"));
    }
    let combos = grid.combinations()?;
    let records: Vec<TuningRecord> = combos
        .par_iter()
        .map(
            |&spec| match run_design(ctx, spec, scenarios, settings, data) {
                Ok(run) => TuningRecord {
                    spec,
                    ecds: run.results.iter().map(|r| r.ecd).collect(),
                    mean_ecd: Some(run.mean_ecd()),
                    calibration: Some(run.calibration),
                    results: run.results,
                    error: None,
                },
                Err(e) => TuningRecord {
                    spec,
                    calibration: None,
                    ecds: Vec::new(),
                    mean_ecd: None,
                    results: Vec::new(),
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();
    let winner = best(records.iter().map(|r| r.mean_ecd));
    Ok(TuningReport {
        family: grid.family,
        scenarios: scenarios.iter().map(|s| s.name.clone()).collect(),
        alpha: settings.target.alpha,
        records,
        winner,
    })
}
