//! Alternating optimization of the element assignment and the power pair:
//! solve the relaxed assignment for fixed powers, round it, re-solve the
//! powers by genetic search for the fixed assignment, and repeat until the
//! secrecy objective stops moving.
//!
//! The power search is stochastic, so a new iterate is accepted only when it
//! does not lower the objective; on the first decrease the previous iterate
//! is kept and the loop stops, which keeps the trace monotone and guarantees
//! termination.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelState, LinkMode, OpticalParams, User};
use crate::irs_alloc::{gain_thresholds, round_greedy, solve_relaxed, Allocation, IrsAllocError};
use crate::noma::{rate, secrecy_capacity, sinr_trusted, sinr_untrusted, NoiseModel, PowerSplit, RateRequirements};
use crate::power_ga::{repair, run_adaptive_restart_ctx, Chromosome, GaConfig, PowerContext};

/// One optimization instance: the channel realization plus every fixed
/// parameter of the joint problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub state: ChannelState,
    pub noise: NoiseModel,
    pub req: RateRequirements,
    pub params: OpticalParams,
    pub p_led: f64,
    pub mode: LinkMode,
}

/// Alternating-loop knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AltOptConfig {
    /// Convergence tolerance on the objective, bit/s.
    pub delta1: f64,
    pub max_iters: usize,
    pub ga: GaConfig,
}

impl AltOptConfig {
    /// Defaults scaled to the modulation bandwidth.
    pub fn for_bandwidth(bandwidth: f64) -> Self {
        Self {
            delta1: 1e-3 * bandwidth,
            max_iters: 20,
            ga: GaConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.delta1 > 0.0) {
            return Err("altopt.delta1: must be > 0".into());
        }
        if self.max_iters < 1 {
            return Err("altopt.max_iters: must be >= 1".into());
        }
        self.ga.validate()
    }
}

/// Outcome of one optimization run; the unit of Monte Carlo aggregation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecrecyReport {
    /// Achieved secrecy capacity, clamped at zero, bit/s.
    pub c_t: f64,
    pub r_t: f64,
    pub r_u: f64,
    pub allocation: Allocation,
    pub power: PowerSplit,
    pub feasible: bool,
    pub iterations: usize,
    /// Raw objective value after each accepted iteration.
    pub trace: Vec<f64>,
}

fn evaluate(inst: &ProblemInstance, alloc: &Allocation, power: &PowerSplit) -> (f64, f64, f64) {
    let h_t = alloc.gains(&inst.state, User::Trusted);
    let h_u = alloc.gains(&inst.state, User::Untrusted);
    let w = inst.params.bandwidth;
    let r_t = rate(sinr_trusted(h_t, power, &inst.noise, &inst.params), w);
    let r_u = rate(sinr_untrusted(h_u, power, &inst.noise, &inst.params), w);
    let ct = secrecy_capacity(h_t, h_u, power, &inst.noise, &inst.params);
    (ct, r_t, r_u)
}

fn solve_assignment(inst: &ProblemInstance, power: &PowerSplit) -> Result<Allocation, IrsAllocError> {
    let n = inst.state.n_elements();
    if inst.mode == LinkMode::LosOnly || n == 0 {
        return Ok(Allocation::zeros(n));
    }
    let thresholds = gain_thresholds(power, &inst.noise, &inst.req, &inst.params)?;
    let relaxed = solve_relaxed(&inst.state, &thresholds, inst.mode)?;
    round_greedy(&relaxed, &inst.state, &thresholds)
}

fn report_for(inst: &ProblemInstance, alloc: Allocation, power: PowerSplit, iterations: usize, trace: Vec<f64>) -> SecrecyReport {
    let (ct, r_t, r_u) = evaluate(inst, &alloc, &power);
    let feasible = r_t >= inst.req.r_min_t
        && r_u >= inst.req.r_min_u
        && power.validate().is_ok()
        && alloc.validate().is_ok();
    SecrecyReport {
        c_t: ct.max(0.0),
        r_t,
        r_u,
        allocation: alloc,
        power,
        feasible,
        iterations,
        trace,
    }
}

/// Run the alternating loop on one instance.
///
/// Initialization starts from the `(0.3, 0.7)` split of the budget and, when
/// the assignment subproblem rejects that split, resamples the power pair
/// uniformly up to 50 times before reporting the instance infeasible. Every
/// power-search invocation draws a fresh seed from `rng`, so the whole run is
/// reproducible from the caller's stream.
pub fn optimize(inst: &ProblemInstance, cfg: &AltOptConfig, rng: &mut ChaCha8Rng) -> SecrecyReport {
    let mut power = PowerSplit {
        p_t: 0.3 * inst.p_led,
        p_u: 0.7 * inst.p_led,
        p_led: inst.p_led,
    };

    // Initialization: find a power pair the assignment subproblem accepts.
    let mut alloc = None;
    for _attempt in 0..=50 {
        match solve_assignment(inst, &power) {
            Ok(a) => {
                alloc = Some(a);
                break;
            }
            Err(_) => {
                let c = repair(
                    &Chromosome {
                        p_t: rng.gen_range(0.0..inst.p_led),
                        p_u: rng.gen_range(0.0..inst.p_led),
                    },
                    inst.p_led,
                );
                power = PowerSplit {
                    p_t: c.p_t,
                    p_u: c.p_u,
                    p_led: inst.p_led,
                };
            }
        }
    }
    let Some(mut alloc) = alloc else {
        let n = inst.state.n_elements();
        let mut report = report_for(inst, Allocation::zeros(n), power, 0, Vec::new());
        report.feasible = false;
        return report;
    };

    let mut best: Option<(Allocation, PowerSplit, f64)> = None;
    let mut trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..cfg.max_iters {
        iterations += 1;

        // Power subproblem for the fixed assignment, freshly seeded.
        let ga_cfg = GaConfig {
            seed: rng.gen::<u64>(),
            ..cfg.ga.clone()
        };
        let ctx = PowerContext::from_allocation(&alloc, &inst.state, &inst.noise, &inst.req, &inst.params, inst.p_led);
        let Ok(new_power) = run_adaptive_restart_ctx(&ctx, &ga_cfg) else {
            break;
        };

        let (ct, _, _) = evaluate(inst, &alloc, &new_power);
        if let Some((_, _, best_ct)) = &best {
            if ct < *best_ct {
                break; // keep the previous iterate
            }
        }
        let prev = trace.last().copied();
        best = Some((alloc.clone(), new_power, ct));
        trace.push(ct);
        power = new_power;
        if let Some(prev) = prev {
            if (ct - prev).abs() < cfg.delta1 {
                break;
            }
        }

        // Assignment subproblem for the next iterate.
        match solve_assignment(inst, &power) {
            Ok(a) => alloc = a,
            Err(_) => break,
        }
    }

    match best {
        Some((alloc, power, _)) => report_for(inst, alloc, power, iterations, trace),
        None => {
            let n = inst.state.n_elements();
            let mut report = report_for(inst, Allocation::zeros(n), power, iterations, trace);
            report.feasible = false;
            report
        }
    }
}
