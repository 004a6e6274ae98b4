//! Run configuration: parsing, presets and resolution into engine inputs.

use std::path::{Path, PathBuf};

use powerbasket::{
    presets, DesignSpec, Engine, Family, GridAxis, Scenario, TrialConfig, TuningGrid,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Built-in trial and scenario set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "paper-table-1")]
    PaperTable1,
}

/// Built-in tuning grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridPreset {
    #[serde(rename = "paper-grids")]
    PaperGrids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: Format::Csv,
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A design with an optional fixed threshold; without one the threshold is
/// calibrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "toml::Table", into = "toml::Table")]
pub struct DesignEntry {
    pub spec: DesignSpec,
    pub lambda: Option<f64>,
}

impl TryFrom<toml::Table> for DesignEntry {
    type Error = String;

    fn try_from(mut table: toml::Table) -> Result<Self, String> {
        let lambda = match table.remove("lambda") {
            None => None,
            Some(toml::Value::Float(x)) => Some(x),
            Some(toml::Value::Integer(x)) => Some(x as f64),
            Some(other) => return Err(format!("lambda must be a number, got {other}")),
        };
        if let Some(l) = lambda {
            if !(l > 0.0 && l < 1.0) {
                return Err(format!("lambda must lie in (0, 1), got {l}"));
            }
        }
        let spec: DesignSpec = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| e.message().to_string())?;
        spec.validate().map_err(|e| e.to_string())?;
        Ok(Self { spec, lambda })
    }
}

impl From<DesignEntry> for toml::Table {
    fn from(d: DesignEntry) -> Self {
        let mut table = match toml::Value::try_from(d.spec) {
            Ok(toml::Value::Table(t)) => t,
            _ => unreachable!("design specs serialise to tables"),
        };
        if let Some(l) = d.lambda {
            table.insert("lambda".into(), toml::Value::Float(l));
        }
        table
    }
}

/// Grid for one family, either built in or listed axis by axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridEntry {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<GridPreset>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub axes: Vec<GridAxis>,
}

impl GridEntry {
    pub fn grid(&self) -> Result<TuningGrid, CliError> {
        match (self.preset, self.axes.is_empty()) {
            (Some(GridPreset::PaperGrids), true) => Ok(presets::grid(self.family)),
            (None, false) => {
                TuningGrid::new(self.family, self.axes.clone()).map_err(CliError::config)
            }
            (None, true) if self.family.parameter_names().is_empty() => {
                TuningGrid::new(self.family, vec![]).map_err(CliError::config)
            }
            _ => Err(CliError::Config(format!(
                "grid for {} needs exactly one of preset or axes",
                self.family.slug()
            ))),
        }
    }
}

fn default_alpha() -> f64 {
    presets::ALPHA
}

fn default_digits() -> u32 {
    powerbasket::calibrate::DEFAULT_LAMBDA_DIGITS
}

fn default_engine() -> Engine {
    Engine::Exact
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Supplies the trial and scenarios when those sections are absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Decimal digits of calibrated thresholds, rounded up.
    #[serde(default = "default_digits")]
    pub lambda_digits: u32,
    /// Enumerate JSD-Global and MML exactly.
    #[serde(default, skip_serializing_if = "is_false")]
    pub allow_costly_exact: bool,
    #[serde(default = "default_engine")]
    pub engine: Engine,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<TrialConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub designs: Vec<DesignEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<Scenario>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grids: Vec<GridEntry>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Trial a design runs on: the declared one, or the preset trial for
    /// its family.
    pub fn trial_for(&self, family: Family) -> Result<TrialConfig, CliError> {
        match (&self.trial, self.preset) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(Preset::PaperTable1)) => Ok(presets::trial_for(family)),
            (None, None) => Err(CliError::Config(
                "missing [trial] section and no preset".into(),
            )),
        }
    }

    pub fn scenario_list(&self) -> Result<Vec<Scenario>, CliError> {
        if !self.scenarios.is_empty() {
            return Ok(self.scenarios.clone());
        }
        match self.preset {
            Some(Preset::PaperTable1) => Ok(presets::scenarios()),
            None => Err(CliError::Config("no scenarios declared".into())),
        }
    }

    pub fn require_designs(&self) -> Result<(), CliError> {
        if self.designs.is_empty() {
            return Err(CliError::Config("no designs declared".into()));
        }
        Ok(())
    }

    /// Checks that every scenario fits the trial of every family in use.
    pub fn check_scenarios(&self, families: &[Family]) -> Result<Vec<Scenario>, CliError> {
        let scenarios = self.scenario_list()?;
        for &family in families {
            let k = self.trial_for(family)?.k();
            if let Some(s) = scenarios.iter().find(|s| s.true_rates.len() != k) {
                return Err(CliError::Config(format!(
                    "scenario '{}' has {} rates, trial has {k} baskets",
                    s.name,
                    s.true_rates.len()
                )));
            }
        }
        Ok(scenarios)
    }

    pub fn validate_settings(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(1..=6).contains(&self.lambda_digits) {
            return Err(CliError::Config(format!(
                "lambda_digits must lie in 1..=6, got {}",
                self.lambda_digits
            )));
        }
        if let Engine::Simulated { n_sims, .. } = self.engine {
            if n_sims == 0 {
                return Err(CliError::Config("n_sims must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Engine and output flags that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub engine: Option<EngineChoice>,
    pub sims: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Exact,
    Sim,
}

impl Overrides {
    pub fn apply(&self, run: &mut RunConfig) -> Result<(), CliError> {
        let (sims, seed) = match run.engine {
            Engine::Simulated { n_sims, seed } => (n_sims, seed),
            Engine::Exact => (presets::N_SIMS, presets::SEED),
        };
        let sims = self.sims.unwrap_or(sims);
        let seed = self.seed.unwrap_or(seed);
        let simulated = match self.engine {
            Some(EngineChoice::Sim) => true,
            Some(EngineChoice::Exact) => false,
            None => matches!(run.engine, Engine::Simulated { .. }),
        };
        if simulated {
            run.engine = Engine::Simulated { n_sims: sims, seed };
        } else if self.sims.is_some() || self.seed.is_some() {
            return Err(CliError::Config(
                "--sims and --seed need the simulated engine".into(),
            ));
        } else {
            run.engine = Engine::Exact;
        }
        if let Some(dir) = &self.out {
            run.output.dir = dir.clone();
        }
        if let Some(f) = self.format {
            run.output.format = f;
        }
        run.validate_settings()
    }
}
