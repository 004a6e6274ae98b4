//! Table writing and number rendering.

use std::fs;
use std::path::{Path, PathBuf};

use powerbasket::{Engine, OcResult};
use serde::Serialize;

use crate::error::CliError;

/// Full-precision rendering (shortest form that parses back exactly).
pub fn full(x: f64) -> String {
    format!("{x}")
}

/// Three-decimal rendering used by the published tables.
pub fn fixed3(x: f64) -> String {
    format!("{x:.3}")
}

/// FWER cell; "." where no basket is null.
pub fn fwer_cell(fwer: Option<f64>, render: fn(f64) -> String) -> String {
    fwer.map_or_else(|| ".".to_string(), render)
}

pub fn opt_cell(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

pub fn engine_label(engine: Engine) -> String {
    match engine {
        Engine::Exact => "exact".into(),
        Engine::Simulated { n_sims, seed } => format!("simulated(seed={seed}, n_sims={n_sims})"),
    }
}

pub fn provenance(result: &OcResult) -> String {
    match (result.seed, result.n_sims) {
        (Some(seed), Some(n_sims)) => engine_label(Engine::Simulated { n_sims, seed }),
        _ => "exact".into(),
    }
}

pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_csv(
    path: &Path,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<PathBuf, CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

/// Left-aligned plain-text table for the terminal.
pub fn text_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header);
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_numbers() {
        assert_eq!(fixed3(0.17551), "0.176");
        assert_eq!(full(0.1), "0.1");
        assert_eq!(fwer_cell(None, fixed3), ".");
        assert_eq!(fwer_cell(Some(0.27449), fixed3), "0.274");
        assert_eq!(
            engine_label(Engine::Simulated {
                n_sims: 10,
                seed: 3
            }),
            "simulated(seed=3, n_sims=10)"
        );
    }

    #[test]
    fn aligns_text_tables() {
        let t = text_table(
            &["a".into(), "bb".into()],
            &[vec!["xyz".into(), "1".into()]],
        );
        assert_eq!(t, "a    bb\nxyz  1\n");
    }
}
