//! Result emission: per-trial CSV, per-sweep-point summary CSV, and a JSON
//! echo of the resolved run. Row order and float formatting are fixed, so
//! identical seeds reproduce byte-identical files regardless of worker count.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use luxsec_core::{LinkMode, Scenario};

use crate::config::{RunManifest, SweepAxis};
use crate::runner::{CampaignRow, RunOutcome};
use crate::CliError;

/// Nine significant digits, scientific; parses back losslessly at that
/// precision.
pub fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

fn io_err(e: std::io::Error, path: &Path) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

pub const TRIALS_HEADER: &str = "trial,mode,n_elements,snr_db,c_t,r_t,r_u,feasible,iters";
pub const SUMMARY_HEADER: &str =
    "axis,axis_value,mode,trials,feasible,median_c_t,mean_c_t,median_r_t,median_r_u,improvement_pct";

fn axis_name(axis: &SweepAxis) -> &'static str {
    match axis {
        SweepAxis::None => "none",
        SweepAxis::NElements(_) => "n_elements",
        SweepAxis::SnrDb(_) => "snr_db",
    }
}

fn axis_value(axis: &SweepAxis, row: &CampaignRow) -> String {
    match axis {
        SweepAxis::None => "0".to_string(),
        SweepAxis::NElements(_) => row.n_elements.to_string(),
        SweepAxis::SnrDb(_) => fmt9(row.snr_tx_db),
    }
}

pub fn write_trials_csv(path: &Path, rows: &[CampaignRow], with_oracle: bool) -> Result<(), CliError> {
    let mut out = Vec::new();
    let header = if with_oracle {
        format!("{TRIALS_HEADER},oracle_c_t,oracle_gap")
    } else {
        TRIALS_HEADER.to_string()
    };
    writeln!(out, "{header}").expect("vec write");
    for row in rows {
        for (i, report) in row.reports.iter().enumerate() {
            let mut line = format!(
                "{},{},{},{},{},{},{},{},{}",
                i,
                row.mode.as_str(),
                row.n_elements,
                fmt9(row.snr_tx_db),
                fmt9(report.c_t),
                fmt9(report.r_t),
                fmt9(report.r_u),
                report.feasible,
                report.iterations,
            );
            if with_oracle {
                match row.oracle_c_t.as_ref().and_then(|v| v[i]) {
                    Some(oracle_ct) => {
                        line.push_str(&format!(",{},{}", fmt9(oracle_ct), fmt9(oracle_ct - report.c_t)));
                    }
                    None => line.push_str(",,"),
                }
            }
            writeln!(out, "{line}").expect("vec write");
        }
    }
    std::fs::write(path, out).map_err(|e| io_err(e, path))
}

pub fn write_summary_csv(path: &Path, axis: &SweepAxis, rows: &[CampaignRow]) -> Result<(), CliError> {
    let mut out = Vec::new();
    writeln!(out, "{SUMMARY_HEADER}").expect("vec write");
    for row in rows {
        let (median_c_t, mean_c_t, median_r_t, median_r_u, feasible) = match &row.summary {
            Some(s) => (
                fmt9(s.median_c_t),
                fmt9(s.mean_c_t),
                fmt9(s.median_r_t),
                fmt9(s.median_r_u),
                s.feasible_count,
            ),
            None => (String::new(), String::new(), String::new(), String::new(), 0),
        };
        let improvement = row.improvement_pct.map(fmt9).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            axis_name(axis),
            axis_value(axis, row),
            row.mode.as_str(),
            row.reports.len(),
            feasible,
            median_c_t,
            mean_c_t,
            median_r_t,
            median_r_u,
            improvement,
        )
        .expect("vec write");
    }
    std::fs::write(path, out).map_err(|e| io_err(e, path))
}

#[derive(Serialize)]
struct ManifestEcho<'a> {
    seed: u64,
    trials: usize,
    modes: Vec<&'static str>,
    sweep: &'a SweepAxis,
    element_pitch: f64,
    config_path: Option<String>,
    out_dir: String,
    scenario: &'a Scenario,
    outputs: Vec<String>,
}

pub fn write_manifest(
    path: &Path,
    scenario: &Scenario,
    manifest: &RunManifest,
    modes: &[LinkMode],
    outputs: &[PathBuf],
) -> Result<(), CliError> {
    let echo = ManifestEcho {
        seed: manifest.seed,
        trials: manifest.trials,
        modes: modes.iter().map(|m| m.as_str()).collect(),
        sweep: &manifest.sweep,
        element_pitch: manifest.element_pitch,
        config_path: manifest.config_path.as_ref().map(|p| p.display().to_string()),
        out_dir: manifest.out_dir.display().to_string(),
        scenario,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let json = serde_json::to_string_pretty(&echo).expect("manifest serializes");
    std::fs::write(path, json).map_err(|e| io_err(e, path))
}

/// Write the three artifacts into `out_dir`, creating it if needed.
pub fn emit_results(outcome: &RunOutcome, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| io_err(e, out_dir))?;
    let trials_path = out_dir.join("trials.csv");
    let summary_path = out_dir.join("summary.csv");
    let manifest_path = out_dir.join("manifest.json");

    write_trials_csv(&trials_path, &outcome.rows, outcome.with_oracle)?;
    write_summary_csv(&summary_path, &outcome.manifest.sweep, &outcome.rows)?;
    write_manifest(
        &manifest_path,
        &outcome.scenario,
        &outcome.manifest,
        &outcome.modes,
        &[trials_path.clone(), summary_path.clone()],
    )?;
    Ok(vec![trials_path, summary_path, manifest_path])
}
