//! Monte Carlo campaigns: random user pairs dropped in the room, one
//! optimization run per trial, and paired aggregation against a
//! line-of-sight-only baseline sharing the same placements.
//!
//! Reproducibility contract: trial `i` of a campaign with seed `s` draws from
//! stream `i` of a ChaCha generator seeded with `s`, so results are identical
//! across runs, trial orderings, and worker counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::altopt::{optimize, AltOptConfig, ProblemInstance, SecrecyReport};
use crate::channel::{ChannelState, LinkMode, OpticalParams, User};
use crate::geom::{place_irs_grid, sample_user_position, IrsGrid, RoomConfig};
use crate::irs_alloc::Allocation;
use crate::noma::{rate, secrecy_capacity, sinr_trusted, sinr_untrusted, NoiseModel, PowerSplit, RateRequirements};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("campaign infeasible: all {0} trials failed their rate constraints")]
    CampaignInfeasible(usize),
    #[error("oracle instance too large: {n} elements (max 8) or {n_grid} grid points (max 201)")]
    OracleTooLarge { n: usize, n_grid: usize },
}

/// Immutable description of one simulated deployment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub room: RoomConfig,
    pub grid: IrsGrid,
    pub optical: OpticalParams,
    /// Transmit power budget, W.
    pub p_led: f64,
    /// Transmit SNR driving the noise level, dB.
    pub snr_tx_db: f64,
    /// Absolute rate minimums, bit/s.
    pub req: RateRequirements,
    pub mode: LinkMode,
    pub trials: usize,
    pub seed: u64,
    pub altopt: AltOptConfig,
}

impl Scenario {
    /// Reference deployment: 3 x 3 x 5 room, 40 elements at 0.1 m pitch,
    /// SNR 80 dB, rate minimums of half a bit/s/Hz, 1000 trials.
    pub fn baseline() -> Self {
        let room = RoomConfig::default();
        let optical = OpticalParams::default();
        let grid = place_irs_grid(&room, 40, 0.1).expect("default grid fits the wall");
        let w = optical.bandwidth;
        Self {
            room,
            grid,
            optical,
            p_led: 1.0,
            snr_tx_db: 80.0,
            req: RateRequirements {
                r_min_t: 0.5 * w,
                r_min_u: 0.5 * w,
            },
            mode: LinkMode::Combined,
            trials: 1000,
            seed: 42,
            altopt: AltOptConfig::for_bandwidth(w),
        }
    }

    pub fn with_mode(&self, mode: LinkMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        self.room.validate()?;
        self.optical.validate()?;
        if self.trials < 1 {
            return Err("trials: must be >= 1".into());
        }
        if !(self.p_led > 0.0) {
            return Err("p_led: must be > 0".into());
        }
        self.req.validate()?;
        self.altopt.validate()?;
        Ok(())
    }

    fn noise(&self) -> NoiseModel {
        NoiseModel::from_transmit_snr_db(self.snr_tx_db, self.p_led, self.optical.responsivity)
    }
}

/// Feasible-trial summary statistics, bit/s.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub median_c_t: f64,
    pub mean_c_t: f64,
    pub median_r_t: f64,
    pub mean_r_t: f64,
    pub median_r_u: f64,
    pub mean_r_u: f64,
    pub feasible_count: usize,
}

/// All per-trial reports of one campaign plus its paired baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignResult {
    pub mode: LinkMode,
    pub n_elements: usize,
    pub snr_tx_db: f64,
    pub reports: Vec<SecrecyReport>,
    /// Line-of-sight-only twin with identical seed and placements; absent
    /// when the campaign itself runs in that mode.
    pub baseline: Option<Vec<SecrecyReport>>,
    pub summary: CampaignSummary,
    /// Median of paired per-trial secrecy ratios against the baseline, in
    /// percent. Defined only when the baseline's median secrecy is positive.
    pub improvement_pct: Option<f64>,
    pub infeasible_count: usize,
}

pub fn median(values: &mut Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Feasible-trial medians and means of one report set.
pub fn summarize_reports(reports: &[SecrecyReport]) -> CampaignSummary {
    let feasible: Vec<&SecrecyReport> = reports.iter().filter(|r| r.feasible).collect();
    let pick = |f: fn(&SecrecyReport) -> f64| -> (f64, f64) {
        let mut v: Vec<f64> = feasible.iter().map(|r| f(r)).collect();
        let mean = if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        };
        (median(&mut v), mean)
    };
    let (median_c_t, mean_c_t) = pick(|r| r.c_t);
    let (median_r_t, mean_r_t) = pick(|r| r.r_t);
    let (median_r_u, mean_r_u) = pick(|r| r.r_u);
    CampaignSummary {
        median_c_t,
        mean_c_t,
        median_r_t,
        mean_r_t,
        median_r_u,
        mean_r_u,
        feasible_count: feasible.len(),
    }
}

/// One trial: sample the user pair, build the channel for the scenario mode,
/// and run the optimizer. Deterministic in `(scenario.seed, trial_index)`.
pub fn run_trial(scn: &Scenario, trial_index: u64) -> SecrecyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    rng.set_stream(trial_index);

    // First sampled position is the trusted user, second the untrusted.
    let trusted = sample_user_position(&scn.room, &mut rng);
    let untrusted = sample_user_position(&scn.room, &mut rng);

    let state = match ChannelState::compute(trusted, untrusted, &scn.room, &scn.grid, &scn.optical, scn.mode) {
        Ok(s) => s,
        Err(_) => {
            // Degenerate placement (coincident points); count as infeasible.
            return SecrecyReport {
                c_t: 0.0,
                r_t: 0.0,
                r_u: 0.0,
                allocation: Allocation::zeros(scn.grid.n_elements),
                power: PowerSplit {
                    p_t: 0.3 * scn.p_led,
                    p_u: 0.7 * scn.p_led,
                    p_led: scn.p_led,
                },
                feasible: false,
                iterations: 0,
                trace: Vec::new(),
            };
        }
    };

    let inst = ProblemInstance {
        state,
        noise: scn.noise(),
        req: scn.req,
        params: scn.optical.clone(),
        p_led: scn.p_led,
        mode: scn.mode,
    };
    optimize(&inst, &scn.altopt, &mut rng)
}

/// Every trial of the scenario, in trial order, no aggregation.
pub fn run_reports(scn: &Scenario) -> Vec<SecrecyReport> {
    (0..scn.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(scn, i))
        .collect()
}

/// Median of paired per-trial improvement ratios, percent; `None` when the
/// baseline median secrecy is not positive or no valid pair exists.
pub fn paired_improvement_pct(reports: &[SecrecyReport], baseline: &[SecrecyReport]) -> Option<f64> {
    let mut base_ct: Vec<f64> = baseline.iter().filter(|r| r.feasible).map(|r| r.c_t).collect();
    if base_ct.is_empty() || median(&mut base_ct) <= 0.0 {
        return None;
    }
    let mut ratios: Vec<f64> = reports
        .iter()
        .zip(baseline)
        .filter(|(r, b)| r.feasible && b.feasible && b.c_t > 0.0)
        .map(|(r, b)| 100.0 * (r.c_t - b.c_t) / b.c_t)
        .collect();
    if ratios.is_empty() {
        return None;
    }
    Some(median(&mut ratios))
}

/// Run every trial of the scenario, plus the paired baseline when the
/// scenario is not already line-of-sight-only.
pub fn run_campaign(scn: &Scenario) -> Result<CampaignResult, SimError> {
    let baseline = match scn.mode {
        LinkMode::LosOnly => None,
        _ => Some(run_reports(&scn.with_mode(LinkMode::LosOnly))),
    };
    run_campaign_with_baseline(scn, baseline)
}

/// As [`run_campaign`], reusing an already-computed baseline campaign (same
/// seed and trial count; the baseline does not depend on the element count).
pub fn run_campaign_with_baseline(
    scn: &Scenario,
    baseline: Option<Vec<SecrecyReport>>,
) -> Result<CampaignResult, SimError> {
    assemble_campaign(scn, run_reports(scn), baseline)
}

/// Aggregate already-computed trial reports into a campaign result.
pub fn assemble_campaign(
    scn: &Scenario,
    reports: Vec<SecrecyReport>,
    baseline: Option<Vec<SecrecyReport>>,
) -> Result<CampaignResult, SimError> {
    let infeasible_count = reports.iter().filter(|r| !r.feasible).count();
    if infeasible_count == reports.len() {
        return Err(SimError::CampaignInfeasible(reports.len()));
    }
    let summary = summarize_reports(&reports);
    let improvement_pct = baseline
        .as_ref()
        .and_then(|b| paired_improvement_pct(&reports, b));
    Ok(CampaignResult {
        mode: scn.mode,
        n_elements: scn.grid.n_elements,
        snr_tx_db: scn.snr_tx_db,
        reports,
        baseline,
        summary,
        improvement_pct,
        infeasible_count,
    })
}

/// Exhaustive reference optimizer: every ternary element assignment crossed
/// with a triangular power grid. Intractable beyond a handful of elements by
/// construction; guarded accordingly.
pub fn brute_force_oracle(inst: &ProblemInstance, n_grid: usize) -> Result<SecrecyReport, SimError> {
    let n = inst.state.n_elements();
    if n > 8 || n_grid > 201 || n_grid < 2 {
        return Err(SimError::OracleTooLarge { n, n_grid });
    }
    let w = inst.params.bandwidth;
    let assignments = 3usize.pow(n as u32);
    let mut best: Option<(f64, Allocation, PowerSplit, f64, f64)> = None;

    for code in 0..assignments {
        let mut alloc = Allocation::zeros(n);
        let mut c = code;
        for i in 0..n {
            match c % 3 {
                1 => alloc.g_t[i] = true,
                2 => alloc.g_u[i] = true,
                _ => {}
            }
            c /= 3;
        }
        let h_t = alloc.gains(&inst.state, User::Trusted);
        let h_u = alloc.gains(&inst.state, User::Untrusted);

        for i in 1..n_grid {
            let p_t = i as f64 * inst.p_led / (n_grid - 1) as f64;
            for j in (i + 1)..n_grid {
                if i + j > n_grid - 1 {
                    break;
                }
                let p_u = j as f64 * inst.p_led / (n_grid - 1) as f64;
                let power = PowerSplit {
                    p_t,
                    p_u,
                    p_led: inst.p_led,
                };
                let r_t = rate(sinr_trusted(h_t, &power, &inst.noise, &inst.params), w);
                let r_u = rate(sinr_untrusted(h_u, &power, &inst.noise, &inst.params), w);
                if r_t < inst.req.r_min_t || r_u < inst.req.r_min_u {
                    continue;
                }
                let ct = secrecy_capacity(h_t, h_u, &power, &inst.noise, &inst.params);
                if best.as_ref().is_none_or(|(b, ..)| ct > *b) {
                    best = Some((ct, alloc.clone(), power, r_t, r_u));
                }
            }
        }
    }

    Ok(match best {
        Some((ct, alloc, power, r_t, r_u)) => SecrecyReport {
            c_t: ct.max(0.0),
            r_t,
            r_u,
            allocation: alloc,
            power,
            feasible: true,
            iterations: 0,
            trace: Vec::new(),
        },
        None => SecrecyReport {
            c_t: 0.0,
            r_t: 0.0,
            r_u: 0.0,
            allocation: Allocation::zeros(n),
            power: PowerSplit {
                p_t: 0.3 * inst.p_led,
                p_u: 0.7 * inst.p_led,
                p_led: inst.p_led,
            },
            feasible: false,
            iterations: 0,
            trace: Vec::new(),
        },
    })
}

/// Problem instance for one trial of a scenario, exposed for oracle
/// cross-checks against [`run_trial`].
pub fn trial_instance(scn: &Scenario, trial_index: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    rng.set_stream(trial_index);
    let trusted = sample_user_position(&scn.room, &mut rng);
    let untrusted = sample_user_position(&scn.room, &mut rng);
    let state = ChannelState::compute(trusted, untrusted, &scn.room, &scn.grid, &scn.optical, scn.mode)
        .expect("sampled placements are non-degenerate");
    ProblemInstance {
        state,
        noise: scn.noise(),
        req: scn.req,
        params: scn.optical.clone(),
        p_led: scn.p_led,
        mode: scn.mode,
    }
}
