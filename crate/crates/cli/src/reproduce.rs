//! Regenerates the published comparison study and diffs it against the
//! embedded published values.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use powerbasket::calibrate::CalibrationTarget;
use powerbasket::presets::{self, published};
use powerbasket::tune::{run_design, DesignRun};
use powerbasket::{
    grid_search_with, DesignContext, DesignSpec, Engine, EvaluationSettings, Family, OcResult,
    Scenario, SharedData, TuningReport,
};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{
    engine_label, fixed3, full, prepare_dir, provenance, text_table, write_csv, write_json,
};

/// Slack for exact cells: threshold step placement and quadrature.
pub const EXACT_TOLERANCE: f64 = 0.003;
/// Simulated cells may differ by this many Monte Carlo standard errors
/// plus [`ROUNDING`].
pub const MC_STANDARD_ERRORS: f64 = 3.0;
/// Half a unit in the last published digit.
pub const ROUNDING: f64 = 0.0005;

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub out: PathBuf,
    pub n_sims: usize,
    pub seed: u64,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            n_sims: presets::N_SIMS,
            seed: presets::SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Equal after rounding to the published precision.
    Match,
    WithinTolerance,
    /// A different winner whose mean ECD is at least the published
    /// winner's under the same engine.
    DominatesPublished,
    OutOfTolerance,
}

impl Status {
    pub fn passes(self) -> bool {
        self != Status::OutOfTolerance
    }

    fn label(self) -> &'static str {
        match self {
            Status::Match => "match",
            Status::WithinTolerance => "within-tolerance",
            Status::DominatesPublished => "dominates-published",
            Status::OutOfTolerance => "out-of-tolerance",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub table: &'static str,
    pub family: &'static str,
    pub scenario: String,
    pub quantity: String,
    pub published: String,
    pub reproduced: String,
    pub reproduced_3dp: String,
    pub diff: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: Status,
    pub provenance: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub alpha: f64,
    pub lambda_digits: u32,
    pub n_sims: usize,
    pub seed: u64,
    pub cells: Vec<Cell>,
}

impl Report {
    pub fn count(&self, status: Status) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }

    pub fn failures(&self) -> usize {
        self.count(Status::OutOfTolerance)
    }
}

fn same_design(a: &DesignSpec, b: &DesignSpec) -> bool {
    a.family() == b.family()
        && a.parameters()
            .iter()
            .zip(b.parameters())
            .all(|(x, y)| (x - y).abs() < 1e-9)
}

/// Grid search of one family plus designs evaluated off the grid.
struct FamilyRuns {
    ctx: Arc<DesignContext>,
    data: SharedData,
    settings: EvaluationSettings,
    scenarios: Vec<Scenario>,
    report: TuningReport,
    extra: Vec<DesignRun>,
}

impl FamilyRuns {
    fn results(&mut self, spec: &DesignSpec) -> Result<Vec<OcResult>, CliError> {
        if let Some(rec) = self
            .report
            .records
            .iter()
            .find(|rec| same_design(&rec.spec, spec))
        {
            return match &rec.error {
                Some(e) => Err(CliError::Numeric(format!("{spec}: {e}"))),
                None => Ok(rec.results.clone()),
            };
        }
        if let Some(run) = self.extra.iter().find(|r| same_design(&r.spec, spec)) {
            return Ok(run.results.clone());
        }
        let run = run_design(
            &self.ctx,
            *spec,
            &self.scenarios,
            &self.settings,
            &self.data,
        )
        .map_err(CliError::engine)?;
        self.extra.push(run);
        Ok(self.extra.last().expect("just pushed").results.clone())
    }

    fn mean_ecd(&mut self, spec: &DesignSpec, over: &[&str]) -> Result<f64, CliError> {
        let results = self.results(spec)?;
        let picked: Vec<f64> = results
            .iter()
            .filter(|r| over.contains(&r.scenario.as_str()))
            .map(|r| r.ecd)
            .collect();
        Ok(picked.iter().sum::<f64>() / picked.len() as f64)
    }
}

struct CellBuilder<'a> {
    cells: &'a mut Vec<Cell>,
    family: Family,
}

impl CellBuilder<'_> {
    fn numeric(
        &mut self,
        table: &'static str,
        scenario: &str,
        quantity: String,
        published: f64,
        got: f64,
        se: Option<f64>,
        prov: String,
    ) {
        let diff = got - published;
        let tolerance = match se {
            Some(se) => MC_STANDARD_ERRORS * se + ROUNDING,
            None => EXACT_TOLERANCE,
        };
        let status = if diff.abs() <= ROUNDING {
            Status::Match
        } else if diff.abs() <= tolerance {
            Status::WithinTolerance
        } else {
            Status::OutOfTolerance
        };
        self.cells.push(Cell {
            table,
            family: self.family.name(),
            scenario: scenario.to_string(),
            quantity,
            published: fixed3(published),
            reproduced: full(got),
            reproduced_3dp: fixed3(got),
            diff: Some(diff),
            tolerance: Some(tolerance),
            status,
            provenance: prov,
        });
    }

    fn absent(
        &mut self,
        table: &'static str,
        scenario: &str,
        quantity: String,
        got: Option<f64>,
        prov: String,
    ) {
        self.cells.push(Cell {
            table,
            family: self.family.name(),
            scenario: scenario.to_string(),
            quantity,
            published: ".".into(),
            reproduced: got.map_or(".".into(), full),
            reproduced_3dp: got.map_or(".".into(), fixed3),
            diff: None,
            tolerance: None,
            status: if got.is_none() {
                Status::Match
            } else {
                Status::OutOfTolerance
            },
            provenance: prov,
        });
    }

    fn all(
        &mut self,
        table: &'static str,
        scenario: &str,
        results: &[OcResult],
        ecds: impl Iterator<Item = (String, f64)>,
    ) {
        for (name, published) in ecds {
            let r = results
                .iter()
                .find(|r| r.scenario == name)
                .expect("scenario evaluated");
            let se = r.mc_se.as_ref().map(|m| m.ecd);
            self.numeric(
                table,
                &name,
                format!("ecd (tuned on {scenario})"),
                published,
                r.ecd,
                se,
                provenance(r),
            );
        }
    }
}

fn winner_cell(
    runs: &mut FamilyRuns,
    cells: &mut Vec<Cell>,
    table: &'static str,
    over: &[&str],
    published: DesignSpec,
) -> Result<(), CliError> {
    let report = &runs.report;
    let idx = report.winner_over(over).map_err(CliError::engine)?;
    let Some(ours) = idx.map(|i| report.records[i].spec) else {
        return Err(CliError::Numeric(format!(
            "no {} combination could be evaluated",
            published.family()
        )));
    };
    let prov = engine_label(runs.settings.engine);
    let (status, diff) = if same_design(&ours, &published) {
        (Status::Match, None)
    } else {
        let gap = runs.mean_ecd(&ours, over)? - runs.mean_ecd(&published, over)?;
        (
            if gap >= 0.0 {
                Status::DominatesPublished
            } else {
                Status::OutOfTolerance
            },
            Some(gap),
        )
    };
    cells.push(Cell {
        table,
        family: published.family().name(),
        scenario: over.join("; "),
        quantity: "winner".into(),
        published: published.parameter_label(),
        reproduced: ours.parameter_label(),
        reproduced_3dp: ours.parameter_label(),
        diff,
        tolerance: None,
        status,
        provenance: prov,
    });
    Ok(())
}

fn family_cells(
    family: Family,
    opts: &ReproduceOptions,
    cells: &mut Vec<Cell>,
) -> Result<(), CliError> {
    let engine = if presets::EXACT_FAMILIES.contains(&family) {
        Engine::Exact
    } else {
        Engine::Simulated {
            n_sims: opts.n_sims,
            seed: opts.seed,
        }
    };
    let settings = EvaluationSettings {
        target: CalibrationTarget::new(presets::ALPHA).with_lambda_digits(presets::LAMBDA_DIGITS),
        engine,
        allow_costly_exact: false,
    };
    let trial = presets::trial_for(family);
    let scenarios = presets::scenarios();
    let data = SharedData::generate(&trial, &scenarios, engine).map_err(CliError::engine)?;
    let ctx = DesignContext::new(trial);
    let grid = presets::grid(family);
    eprintln!(
        "{}: {} design(s), {}",
        family,
        grid.len(),
        engine_label(engine)
    );
    let report =
        grid_search_with(&ctx, &grid, &scenarios, &settings, &data).map_err(CliError::engine)?;
    let mut runs = FamilyRuns {
        ctx,
        data,
        settings,
        scenarios,
        report,
        extra: Vec::new(),
    };

    let design = presets::design(family);
    let results = runs.results(&design)?;
    let mut b = CellBuilder { cells, family };
    for (name, &published) in presets::SCENARIO_NAMES.iter().zip(&published::ecd(family)) {
        let r = results
            .iter()
            .find(|r| r.scenario == *name)
            .expect("scenario evaluated");
        let se = r.mc_se.as_ref().map(|m| m.ecd);
        b.numeric(
            "ecd",
            name,
            "ecd".into(),
            published,
            r.ecd,
            se,
            provenance(r),
        );
    }
    for r in &results {
        let p = published::rejection(&r.scenario, family);
        let se = r.mc_se.as_ref();
        for k in 0..4 {
            let s = se.map(|m| m.rejection_rates[k]);
            b.numeric(
                "rejection",
                &r.scenario,
                format!("reject_{}", k + 1),
                p.rates[k],
                r.rejection_rates[k],
                s,
                provenance(r),
            );
        }
        match (p.fwer, r.fwer) {
            (Some(pf), Some(f)) => b.numeric(
                "rejection",
                &r.scenario,
                "fwer".into(),
                pf,
                f,
                se.and_then(|m| m.fwer),
                provenance(r),
            ),
            (None, got) => b.absent("rejection", &r.scenario, "fwer".into(), got, provenance(r)),
            (Some(_), None) => {
                return Err(CliError::Numeric(format!(
                    "{family} {}: FWER missing",
                    r.scenario
                )))
            }
        }
    }
    for (name, means) in presets::SCENARIO_NAMES
        .iter()
        .zip(published::posterior_means(family))
    {
        let r = results
            .iter()
            .find(|r| r.scenario == *name)
            .expect("scenario evaluated");
        for k in 0..4 {
            let s = r.mc_se.as_ref().map(|m| m.mean_posterior_means[k]);
            b.numeric(
                "posterior-means",
                name,
                format!("mean_{}", k + 1),
                means[k],
                r.mean_posterior_means[k],
                s,
                provenance(r),
            );
        }
    }

    let common = published::COMMON_ALTERNATIVE_WINNERS
        .iter()
        .copied()
        .find(|s| s.family() == family)
        .unwrap_or(design);
    let common_results = runs.results(&common)?;
    let published_common = published::COMMON_ALTERNATIVE_ECD
        .iter()
        .find(|(f, _)| *f == family)
        .expect("published family")
        .1;
    let mut b = CellBuilder { cells, family };
    b.all(
        "ecd-common-alternative",
        "common alternative",
        &common_results,
        presets::COMMON_ALTERNATIVE
            .iter()
            .map(|s| s.to_string())
            .zip(published_common),
    );
    for (target, spec) in published::SINGLE_SCENARIO_WINNERS
        .iter()
        .filter(|(_, s)| s.family() == family)
    {
        let ecds = published::SINGLE_SCENARIO_ECD
            .iter()
            .find(|(t, f, _)| t == target && *f == family)
            .expect("published cell")
            .2;
        let single = runs.results(spec)?;
        let mut b = CellBuilder { cells, family };
        b.all(
            "ecd-single-scenario",
            target,
            &single,
            presets::SCENARIO_NAMES
                .iter()
                .map(|s| s.to_string())
                .zip(ecds),
        );
    }

    if let Some(w) = published::winner(family) {
        winner_cell(&mut runs, cells, "winners", &presets::SCENARIO_NAMES, w)?;
    }
    if let Some(&w) = published::COMMON_ALTERNATIVE_WINNERS
        .iter()
        .find(|s| s.family() == family)
    {
        winner_cell(
            &mut runs,
            cells,
            "winners-common-alternative",
            &presets::COMMON_ALTERNATIVE,
            w,
        )?;
    }
    for (target, spec) in published::SINGLE_SCENARIO_WINNERS
        .iter()
        .filter(|(_, s)| s.family() == family)
    {
        winner_cell(
            &mut runs,
            cells,
            "winners-single-scenario",
            &[target],
            *spec,
        )?;
    }
    Ok(())
}

/// Runs every family of the study and collects the diff cells.
pub fn build_report(opts: &ReproduceOptions) -> Result<Report, CliError> {
    let mut cells = Vec::new();
    for family in presets::EXACT_FAMILIES
        .into_iter()
        .chain(presets::SIMULATED_FAMILIES)
    {
        family_cells(family, opts, &mut cells)?;
    }
    Ok(Report {
        alpha: presets::ALPHA,
        lambda_digits: presets::LAMBDA_DIGITS,
        n_sims: opts.n_sims,
        seed: opts.seed,
        cells,
    })
}

pub fn write_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    prepare_dir(dir)?;
    let header: Vec<String> = [
        "table",
        "family",
        "scenario",
        "quantity",
        "published",
        "reproduced",
        "reproduced_3dp",
        "diff",
        "tolerance",
        "status",
        "provenance",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                c.table.to_string(),
                c.family.to_string(),
                c.scenario.clone(),
                c.quantity.clone(),
                c.published.clone(),
                c.reproduced.clone(),
                c.reproduced_3dp.clone(),
                c.diff.map(full).unwrap_or_default(),
                c.tolerance.map(full).unwrap_or_default(),
                c.status.label().to_string(),
                c.provenance.clone(),
            ]
        })
        .collect();
    Ok(vec![
        write_csv(&dir.join("reproduce_report.csv"), &header, &rows)?,
        write_json(&dir.join("reproduce_report.json"), report)?,
    ])
}

/// Per-table counts of each status.
pub fn summary(report: &Report) -> String {
    let mut tables: Vec<&str> = Vec::new();
    for c in &report.cells {
        if !tables.contains(&c.table) {
            tables.push(c.table);
        }
    }
    let statuses = [
        Status::Match,
        Status::WithinTolerance,
        Status::DominatesPublished,
        Status::OutOfTolerance,
    ];
    let mut header = vec!["table".to_string()];
    header.extend(statuses.iter().map(|s| s.label().to_string()));
    let rows: Vec<Vec<String>> = tables
        .iter()
        .map(|t| {
            let mut row = vec![t.to_string()];
            row.extend(statuses.iter().map(|s| {
                report
                    .cells
                    .iter()
                    .filter(|c| c.table == *t && c.status == *s)
                    .count()
                    .to_string()
            }));
            row
        })
        .collect();
    let mut out = text_table(&header, &rows);
    for c in report.cells.iter().filter(|c| !c.status.passes()) {
        out.push_str(&format!(
            "out of tolerance: {} {} {} {}: published {} reproduced {}\n",
            c.table, c.family, c.scenario, c.quantity, c.published, c.reproduced_3dp
        ));
    }
    out
}
