//! Sweep expansion and campaign execution: one campaign per (sweep point,
//! mode), with the line-of-sight baseline shared wherever the placements make
//! it identical.

use luxsec_core::sim::{self, brute_force_oracle, trial_instance};
use luxsec_core::{place_irs_grid, CampaignSummary, LinkMode, Scenario, SecrecyReport};

use crate::config::{RunManifest, SweepAxis};
use crate::CliError;

/// One campaign's worth of output rows.
#[derive(Debug, Clone)]
pub struct CampaignRow {
    pub mode: LinkMode,
    pub n_elements: usize,
    pub snr_tx_db: f64,
    pub reports: Vec<SecrecyReport>,
    /// Feasible-trial statistics; `None` when every trial failed.
    pub summary: Option<CampaignSummary>,
    pub improvement_pct: Option<f64>,
    pub infeasible_count: usize,
    /// Per-trial oracle secrecy when the cross-check is enabled.
    pub oracle_c_t: Option<Vec<Option<f64>>>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub scenario: Scenario,
    pub manifest: RunManifest,
    pub modes: Vec<LinkMode>,
    pub rows: Vec<CampaignRow>,
    pub with_oracle: bool,
}

impl RunOutcome {
    /// True when at least one campaign produced a feasible trial.
    pub fn any_feasible(&self) -> bool {
        self.rows.iter().any(|r| r.summary.is_some())
    }
}

/// Ordered, de-duplicated mode list; fixed order keeps CSV output stable.
pub fn normalize_modes(requested: &[LinkMode]) -> Vec<LinkMode> {
    LinkMode::ALL
        .into_iter()
        .filter(|m| requested.contains(m))
        .collect()
}

fn scenario_at(base: &Scenario, axis: &SweepAxis, idx: usize, pitch: f64) -> Result<Scenario, CliError> {
    let mut scn = base.clone();
    match axis {
        SweepAxis::None => {}
        SweepAxis::NElements(list) => {
            scn.grid = place_irs_grid(&scn.room, list[idx], pitch).map_err(|e| CliError::ConfigInvalid {
                detail: format!("sweep.n_elements: {e}"),
            })?;
        }
        SweepAxis::SnrDb(list) => scn.snr_tx_db = list[idx],
    }
    Ok(scn)
}

fn oracle_column(scn: &Scenario) -> Vec<Option<f64>> {
    (0..scn.trials as u64)
        .map(|i| {
            let inst = trial_instance(scn, i);
            brute_force_oracle(&inst, 101).ok().map(|r| r.c_t)
        })
        .collect()
}

/// Run every (sweep point, mode) campaign of the plan.
///
/// The baseline for the improvement column is always the line-of-sight-only
/// twin with the same seed and placements; it does not depend on the element
/// count, so an element sweep computes it once.
pub fn execute(
    scenario: &Scenario,
    manifest: &RunManifest,
    modes: &[LinkMode],
    with_oracle: bool,
) -> Result<RunOutcome, CliError> {
    let modes = normalize_modes(modes);
    if with_oracle && scenario.grid.n_elements > 8 {
        return Err(CliError::ConfigInvalid {
            detail: "oracle cross-check requires n_elements <= 8".into(),
        });
    }

    let points = match &manifest.sweep {
        SweepAxis::None => 1,
        SweepAxis::NElements(list) => list.len(),
        SweepAxis::SnrDb(list) => list.len(),
    };

    // The baseline is element-count-invariant, so it survives N-sweep points.
    let mut cached_los: Option<Vec<SecrecyReport>> = None;
    let mut rows = Vec::new();

    for idx in 0..points {
        let point_scn = scenario_at(scenario, &manifest.sweep, idx, manifest.element_pitch)?;
        if with_oracle && point_scn.grid.n_elements > 8 {
            return Err(CliError::ConfigInvalid {
                detail: "oracle cross-check requires n_elements <= 8 at every sweep point".into(),
            });
        }

        let los_reports = match (&manifest.sweep, &cached_los) {
            (SweepAxis::SnrDb(_), _) | (_, None) => {
                let reports = sim::run_reports(&point_scn.with_mode(LinkMode::LosOnly));
                if matches!(manifest.sweep, SweepAxis::None | SweepAxis::NElements(_)) {
                    cached_los = Some(reports.clone());
                }
                reports
            }
            (_, Some(cached)) => cached.clone(),
        };

        for mode in &modes {
            let mode_scn = point_scn.with_mode(*mode);
            let reports = if *mode == LinkMode::LosOnly {
                los_reports.clone()
            } else {
                sim::run_reports(&mode_scn)
            };
            let infeasible_count = reports.iter().filter(|r| !r.feasible).count();
            let summary = (infeasible_count < reports.len()).then(|| sim::summarize_reports(&reports));
            let improvement_pct = match mode {
                LinkMode::LosOnly => None,
                _ => sim::paired_improvement_pct(&reports, &los_reports),
            };
            let oracle_c_t = with_oracle.then(|| oracle_column(&mode_scn));
            rows.push(CampaignRow {
                mode: *mode,
                n_elements: mode_scn.grid.n_elements,
                snr_tx_db: mode_scn.snr_tx_db,
                reports,
                summary,
                improvement_pct,
                infeasible_count,
                oracle_c_t,
            });
        }
    }

    Ok(RunOutcome {
        scenario: scenario.clone(),
        manifest: manifest.clone(),
        modes,
        rows,
        with_oracle,
    })
}
