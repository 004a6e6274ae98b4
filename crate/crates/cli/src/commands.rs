//! The calibrate, oc and tune subcommands.

use std::path::PathBuf;
use std::sync::Arc;

use powerbasket::calibrate::CalibrationTarget;
use powerbasket::tune::{evaluate_at, run_design, TuningRecord};
use powerbasket::{
    grid_search_with, CalibrationResult, DesignContext, DesignEvaluator, DesignSpec,
    EvaluationSettings, Family, OcResult, Scenario, SharedData, TrialConfig, TuningReport,
};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{
    engine_label, fixed3, full, fwer_cell, opt_cell, prepare_dir, provenance, text_table,
    write_csv, write_json,
};

/// Files written and the terminal summary of a command.
#[derive(Debug, Default)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn settings(run: &RunConfig) -> EvaluationSettings {
    EvaluationSettings {
        target: CalibrationTarget::new(run.alpha).with_lambda_digits(run.lambda_digits),
        engine: run.engine,
        allow_costly_exact: run.allow_costly_exact,
    }
}

/// Contexts and simulated data shared by every design on the same trial.
struct Workspace {
    entries: Vec<(TrialConfig, Arc<DesignContext>, SharedData)>,
}

impl Workspace {
    fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    fn get(
        &mut self,
        trial: TrialConfig,
        scenarios: &[Scenario],
        run: &RunConfig,
    ) -> Result<(Arc<DesignContext>, &SharedData), CliError> {
        let pos = match self.entries.iter().position(|(t, _, _)| *t == trial) {
            Some(p) => p,
            None => {
                let data = SharedData::generate(&trial, scenarios, run.engine)
                    .map_err(CliError::engine)?;
                let ctx = DesignContext::new(trial.clone());
                self.entries.push((trial, ctx, data));
                self.entries.len() - 1
            }
        };
        let (_, ctx, data) = &self.entries[pos];
        Ok((ctx.clone(), data))
    }
}

#[derive(Serialize)]
struct CalibrationRow {
    design: DesignSpec,
    engine: String,
    calibration: Option<CalibrationResult>,
    error: Option<String>,
}

pub fn calibrate(run: &RunConfig) -> Result<CommandOutput, CliError> {
    run.require_designs()?;
    let settings = settings(run);
    let mut ws = Workspace::new();
    let mut rows = Vec::new();
    for d in &run.designs {
        let trial = run.trial_for(d.spec.family())?;
        let (ctx, data) = ws.get(trial, &[], run)?;
        let (calibration, error) = match run_design(&ctx, d.spec, &[], &settings, data) {
            Ok(r) => (Some(r.calibration), None),
            Err(e) => {
                let e = CliError::engine(e);
                if let CliError::Config(_) = e {
                    return Err(e);
                }
                (None, Some(e.to_string()))
            }
        };
        rows.push(CalibrationRow {
            design: d.spec,
            engine: engine_label(run.engine),
            calibration,
            error,
        });
    }

    prepare_dir(&run.output.dir)?;
    let header: Vec<String> = [
        "design",
        "family",
        "params",
        "lambda",
        "achieved_fwer",
        "alpha",
        "engine",
        "fwer_mc_se",
        "error",
    ]
    .map(String::from)
    .to_vec();
    let cells = |r: &CalibrationRow, render: fn(f64) -> String| {
        let c = r.calibration.as_ref();
        vec![
            r.design.to_string(),
            r.design.family().slug().to_string(),
            r.design.parameter_label(),
            c.map(|c| render(c.lambda)).unwrap_or_default(),
            c.map(|c| render(c.achieved_fwer)).unwrap_or_default(),
            full(run.alpha),
            r.engine.clone(),
            opt_cell(c.and_then(|c| c.fwer_mc_se)),
            r.error.clone().unwrap_or_default(),
        ]
    };
    let file = match run.output.format {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows.iter().map(|r| cells(r, full)).collect();
            write_csv(&run.output.dir.join("calibration.csv"), &header, &table)?
        }
        Format::Json => write_json(&run.output.dir.join("calibration.json"), &rows)?,
    };
    let shown: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut c = cells(r, |x| format!("{x:.6}"));
            c.truncate(5);
            c.push(r.error.clone().unwrap_or_default());
            c
        })
        .collect();
    let mut head = header[..5].to_vec();
    head.push("error".into());
    let out = CommandOutput {
        files: vec![file],
        summary: text_table(&head, &shown),
    };
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprint!("{}", out.summary);
        return Err(CliError::Numeric(format!(
            "{failed} of {} designs failed to calibrate",
            rows.len()
        )));
    }
    Ok(out)
}

#[derive(Serialize)]
struct OcRun {
    design: DesignSpec,
    lambda: f64,
    lambda_source: &'static str,
    calibration: Option<CalibrationResult>,
    results: Vec<OcResult>,
}

pub fn oc(run: &RunConfig) -> Result<CommandOutput, CliError> {
    run.require_designs()?;
    let families: Vec<Family> = run.designs.iter().map(|d| d.spec.family()).collect();
    let scenarios = run.check_scenarios(&families)?;
    let settings = settings(run);
    let mut ws = Workspace::new();
    let mut runs = Vec::new();
    for d in &run.designs {
        let trial = run.trial_for(d.spec.family())?;
        let (ctx, data) = ws.get(trial, &scenarios, run)?;
        let oc_run = match d.lambda {
            Some(lambda) => {
                let ev = DesignEvaluator::new(ctx, d.spec)
                    .map_err(CliError::engine)?
                    .allow_costly_exact(run.allow_costly_exact);
                OcRun {
                    design: d.spec,
                    lambda,
                    lambda_source: "fixed",
                    calibration: None,
                    results: evaluate_at(&ev, &scenarios, lambda, data)
                        .map_err(CliError::engine)?,
                }
            }
            None => {
                let r = run_design(&ctx, d.spec, &scenarios, &settings, data)
                    .map_err(CliError::engine)?;
                OcRun {
                    design: d.spec,
                    lambda: r.calibration.lambda,
                    lambda_source: "calibrated",
                    calibration: Some(r.calibration),
                    results: r.results,
                }
            }
        };
        runs.push(oc_run);
    }

    let k = runs[0]
        .results
        .first()
        .map_or(0, |r| r.rejection_rates.len());
    let mut header: Vec<String> = [
        "design",
        "family",
        "params",
        "scenario",
        "lambda",
        "lambda_source",
        "provenance",
    ]
    .map(String::from)
    .to_vec();
    header.extend((1..=k).map(|i| format!("reject_{i}")));
    header.extend(["fwer".to_string(), "ecd".to_string()]);
    header.extend((1..=k).map(|i| format!("mean_{i}")));
    let rows = |render: fn(f64) -> String| -> Vec<Vec<String>> {
        runs.iter()
            .flat_map(|o| {
                o.results.iter().map(move |r| {
                    let mut row = vec![
                        o.design.to_string(),
                        o.design.family().slug().to_string(),
                        o.design.parameter_label(),
                        r.scenario.clone(),
                        full(o.lambda),
                        o.lambda_source.to_string(),
                        provenance(r),
                    ];
                    row.extend(r.rejection_rates.iter().map(|&x| render(x)));
                    row.push(fwer_cell(r.fwer, render));
                    row.push(render(r.ecd));
                    row.extend(r.mean_posterior_means.iter().map(|&x| render(x)));
                    row
                })
            })
            .collect()
    };

    prepare_dir(&run.output.dir)?;
    let file = match run.output.format {
        Format::Csv => write_csv(&run.output.dir.join("oc_long.csv"), &header, &rows(full))?,
        Format::Json => write_json(&run.output.dir.join("oc_long.json"), &runs)?,
    };
    let shown: Vec<Vec<String>> = rows(fixed3)
        .into_iter()
        .map(|mut r| {
            r.drain(1..3);
            r.remove(3);
            r
        })
        .collect();
    let mut head = header.clone();
    head.drain(1..3);
    head.remove(3);
    Ok(CommandOutput {
        files: vec![file],
        summary: text_table(&head, &shown),
    })
}

pub fn tune(run: &RunConfig) -> Result<CommandOutput, CliError> {
    if run.grids.is_empty() {
        return Err(CliError::Config("no [[grids]] declared".into()));
    }
    let families: Vec<Family> = run.grids.iter().map(|g| g.family).collect();
    let scenarios = run.check_scenarios(&families)?;
    let settings = settings(run);
    let mut ws = Workspace::new();
    let mut reports = Vec::new();
    for entry in &run.grids {
        let grid = entry.grid()?;
        let trial = run.trial_for(entry.family)?;
        let (ctx, data) = ws.get(trial, &scenarios, run)?;
        eprintln!("tuning {} over {} combinations", entry.family, grid.len());
        let report =
            grid_search_with(&ctx, &grid, &scenarios, &settings, data).map_err(CliError::engine)?;
        reports.push(report);
    }

    prepare_dir(&run.output.dir)?;
    let mut files = Vec::new();
    for report in &reports {
        let stem = format!("tuning_{}", report.family.slug());
        files.push(match run.output.format {
            Format::Csv => {
                let (header, rows) = tuning_table(report);
                write_csv(&run.output.dir.join(format!("{stem}.csv")), &header, &rows)?
            }
            Format::Json => write_json(&run.output.dir.join(format!("{stem}.json")), report)?,
        });
    }
    let header: Vec<String> = [
        "family",
        "winner",
        "lambda",
        "mean_ecd",
        "combinations",
        "failed",
    ]
    .map(String::from)
    .to_vec();
    let summary_rows = |render: fn(f64) -> String| -> Vec<Vec<String>> {
        reports
            .iter()
            .map(|r| {
                let w = r.winner();
                vec![
                    r.family.slug().to_string(),
                    w.map(|w| w.spec.parameter_label()).unwrap_or_default(),
                    w.and_then(|w| w.calibration.as_ref())
                        .map(|c| full(c.lambda))
                        .unwrap_or_default(),
                    w.and_then(|w| w.mean_ecd).map(render).unwrap_or_default(),
                    r.records.len().to_string(),
                    r.records
                        .iter()
                        .filter(|x| x.error.is_some())
                        .count()
                        .to_string(),
                ]
            })
            .collect()
    };
    if run.output.format == Format::Csv {
        files.push(write_csv(
            &run.output.dir.join("tuning_summary.csv"),
            &header,
            &summary_rows(full),
        )?);
    }
    let out = CommandOutput {
        files,
        summary: text_table(&header, &summary_rows(fixed3)),
    };
    if reports.iter().any(|r| r.winner.is_none()) {
        eprint!("{}", out.summary);
        return Err(CliError::Numeric(
            "no grid combination could be evaluated".into(),
        ));
    }
    Ok(out)
}

/// One row per combination: parameters, threshold, per-scenario ECD, mean
/// ECD and a winner mark.
pub fn tuning_table(report: &TuningReport) -> (Vec<String>, Vec<Vec<String>>) {
    let names = report.family.parameter_names();
    let mut header: Vec<String> = names.iter().map(|n| n.to_string()).collect();
    header.extend(["lambda".to_string(), "achieved_fwer".to_string()]);
    header.extend(report.scenarios.iter().map(|s| format!("ecd:{s}")));
    header.extend(["mean_ecd", "winner", "error"].map(String::from));
    let rows = report
        .records
        .iter()
        .enumerate()
        .map(|(i, rec): (usize, &TuningRecord)| {
            let mut row: Vec<String> = rec.spec.parameters().into_iter().map(full).collect();
            let cal = rec.calibration.as_ref();
            row.push(cal.map(|c| full(c.lambda)).unwrap_or_default());
            row.push(cal.map(|c| full(c.achieved_fwer)).unwrap_or_default());
            if rec.ecds.is_empty() {
                row.extend(report.scenarios.iter().map(|_| String::new()));
            } else {
                row.extend(rec.ecds.iter().map(|&e| full(e)));
            }
            row.push(opt_cell(rec.mean_ecd));
            row.push(if report.winner == Some(i) {
                "*".into()
            } else {
                String::new()
            });
            row.push(rec.error.clone().unwrap_or_default());
            row
        })
        .collect();
    (header, rows)
}
