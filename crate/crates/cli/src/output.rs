//! Report types and their JSON and CSV encodings.
//!
//! Column order is stable:
//! - windows: `e_lo,e_hi,K`
//! - feasible points: one column per search dimension, then `min_eigenvalue`
//! - minimization: the swept parameter (if any), `E_min`, one column per search dimension

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ptboot_core::psd::Scaling;
use ptboot_core::search::{FeasiblePoint, ScanStats};
use ptboot_core::{Axis, FeasibleWindow, MinEnergy, ModelId, ScanResult};
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub model: ModelId,
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "K")]
    pub k: usize,
    pub tol: f64,
    pub dims: Vec<Axis>,
    pub refine_iters: u32,
    pub scaling: Scaling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<bool>,
    pub emit_points: bool,
    pub windows: Vec<FeasibleWindow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub feasible_points: Vec<FeasiblePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_energy: Option<MinEnergy>,
    pub stats: ScanStats,
}

impl ScanReport {
    pub fn new(cfg: &RunConfig, result: ScanResult) -> Self {
        let grid = &result.grid;
        Self {
            model: result.model.id(),
            params: result.model.params(),
            k: grid.k,
            tol: grid.tol_scale,
            dims: grid.axes.clone(),
            refine_iters: grid.refine_iters,
            scaling: grid.scaling,
            probe: grid.probe,
            emit_points: cfg.emit_points,
            windows: result.windows,
            feasible_points: if cfg.emit_points { result.feasible_points } else { Vec::new() },
            min_energy: result.min_energy,
            stats: result.stats,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty() && self.min_energy.is_none() && self.feasible_points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeRow {
    /// Value of the swept parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_value: Option<f64>,
    #[serde(rename = "E_min")]
    pub e_min: f64,
    /// Argmin, ordered as `dims`.
    pub argmin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub model: ModelId,
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "K")]
    pub k: usize,
    pub tol: f64,
    pub dims: Vec<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<String>,
    pub rows: Vec<MinimizeRow>,
}

/// Destination file, or stdout when `None`.
pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(format!("cannot create {}", p.display()), e))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = open(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io("writing JSON", e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io("writing JSON", e))
}

fn write_rows(header: Vec<String>, rows: impl IntoIterator<Item = Vec<String>>, out: Option<&Path>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(open(out)?);
    let fail = |e: csv::Error| CliError::io("writing CSV", e.into());
    w.write_record(&header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::io("writing CSV", e))
}

fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_scan(report: &ScanReport, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(report, out),
        Format::Csv if report.emit_points => {
            let mut header: Vec<String> = report.dims.iter().map(|a| a.name.clone()).collect();
            header.push("min_eigenvalue".into());
            let rows = report.feasible_points.iter().map(|p| {
                let mut row: Vec<String> = p.coords.iter().copied().map(num).collect();
                row.push(num(p.min_eigenvalue));
                row
            });
            write_rows(header, rows, out)
        }
        Format::Csv => {
            let header = vec!["e_lo".into(), "e_hi".into(), "K".into()];
            let rows = report
                .windows
                .iter()
                .map(|w| vec![num(w.e_lo), num(w.e_hi), w.k.to_string()]);
            write_rows(header, rows, out)
        }
    }
}

pub fn write_minimize(report: &MinimizeReport, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    match format {
        Format::Json => write_json(report, out),
        Format::Csv => {
            let mut header: Vec<String> = report.sweep.iter().cloned().collect();
            header.push("E_min".into());
            header.extend(report.dims.iter().map(|a| a.name.clone()));
            let rows = report.rows.iter().map(|r| {
                let mut row: Vec<String> = r.sweep_value.into_iter().map(num).collect();
                row.push(num(r.e_min));
                row.extend(r.argmin.iter().copied().map(num));
                row
            });
            write_rows(header, rows, out)
        }
    }
}
