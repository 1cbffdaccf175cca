//! Reflector-to-user assignment for fixed powers: the relaxed allocation
//! problem and the greedy rounding that recovers a binary assignment.
//!
//! The secrecy objective is monotone increasing in the trusted user's
//! effective gain and decreasing in the untrusted user's, so the relaxed
//! optimum has a closed form: give the untrusted user the cheapest fractional
//! coverage that lifts it to its rate threshold (a fractional covering
//! knapsack, solved exactly by a ratio sort with one fractional pivot) and
//! hand everything else to the trusted user. No general-purpose LP solver is
//! involved.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelState, LinkMode, OpticalParams, User};
use crate::noma::{NoiseModel, PowerSplit, RateRequirements};

const E_OVER_2PI: f64 = std::f64::consts::E / std::f64::consts::TAU;

#[derive(Debug, Error, PartialEq)]
pub enum IrsAllocError {
    /// The fixed power pair cannot meet the untrusted rate minimum at any gain.
    #[error("power split cannot satisfy the untrusted rate minimum at any gain")]
    PowerSplitInfeasible,
    /// Even the full reflector bank cannot lift the untrusted user to its threshold.
    #[error("untrusted user unreachable: total reflected gain falls short of the required deficit")]
    UntrustedUnreachable,
    /// After covering the untrusted user, the trusted user misses its threshold.
    #[error("trusted user unreachable: residual effective gain below its threshold")]
    TrustedUnreachable,
    /// The rounding repair ran out of elements to reassign.
    #[error("rounding repair exhausted all elements without meeting the untrusted rate minimum")]
    RoundingInfeasible,
    /// Vectors of mismatched length or overlapping assignments.
    #[error("malformed allocation: {0}")]
    Malformed(String),
}

/// Binary assignment of each element to at most one user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub g_t: Vec<bool>,
    pub g_u: Vec<bool>,
}

impl Allocation {
    pub fn zeros(n: usize) -> Self {
        Self {
            g_t: vec![false; n],
            g_u: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.g_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_t.is_empty()
    }

    /// Check the binary/disjointness constraints: each element serves at most
    /// one user.
    pub fn validate(&self) -> Result<(), IrsAllocError> {
        if self.g_t.len() != self.g_u.len() {
            return Err(IrsAllocError::Malformed(format!(
                "g_t has {} entries, g_u has {}",
                self.g_t.len(),
                self.g_u.len()
            )));
        }
        for (n, (&t, &u)) in self.g_t.iter().zip(&self.g_u).enumerate() {
            if t && u {
                return Err(IrsAllocError::Malformed(format!(
                    "element {n} assigned to both users"
                )));
            }
        }
        Ok(())
    }

    pub fn gains(&self, state: &ChannelState, user: User) -> f64 {
        let g = match user {
            User::Trusted => &self.g_t,
            User::Untrusted => &self.g_u,
        };
        crate::channel::effective_gain(state, user, g).expect("allocation length matches state")
    }
}

/// Fractional assignment with entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedAllocation {
    pub g_t: Vec<f64>,
    pub g_u: Vec<f64>,
}

impl RelaxedAllocation {
    pub fn len(&self) -> usize {
        self.g_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_t.is_empty()
    }
}

/// Effective gain under a fractional assignment.
pub fn fractional_gain(state: &ChannelState, user: User, weights: &[f64]) -> f64 {
    let tilde = state.h_tilde(user);
    debug_assert_eq!(tilde.len(), weights.len());
    state.h_los(user)
        + tilde
            .iter()
            .zip(weights)
            .map(|(h, w)| h * w)
            .sum::<f64>()
}

/// Minimum effective gains each user needs for its rate minimum under the
/// given power pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainThresholds {
    pub tau_t: f64,
    pub tau_u: f64,
}

/// Invert the rate lower bound against both rate minimums.
///
/// The required SINR for a rate minimum `r` is `(2 pi / e)(2^{2r/W} - 1)`;
/// the trusted threshold follows directly, the untrusted one by solving the
/// interference-limited SINR for the gain. Returns `PowerSplitInfeasible`
/// when the untrusted SINR ceiling sits below its requirement, signalling the
/// power search to move.
pub fn gain_thresholds(
    power: &PowerSplit,
    noise: &NoiseModel,
    req: &RateRequirements,
    params: &OpticalParams,
) -> Result<GainThresholds, IrsAllocError> {
    let w = params.bandwidth;
    let rho = params.responsivity;
    let gamma_req = |r_min: f64| (2f64.powf(2.0 * r_min / w) - 1.0) / E_OVER_2PI;

    let g_t = gamma_req(req.r_min_t);
    let tau_t = noise.sigma_t / (rho * power.p_t) * g_t.sqrt();

    let g_u = gamma_req(req.r_min_u);
    let tau_u = if g_u == 0.0 {
        0.0
    } else {
        let int_factor = if params.consistent_rho_squared { rho * rho } else { 1.0 };
        let margin = rho * rho * power.p_u * power.p_u - g_u * int_factor * power.p_t * power.p_t;
        if margin <= 0.0 {
            return Err(IrsAllocError::PowerSplitInfeasible);
        }
        (g_u * noise.sigma_u * noise.sigma_u / margin).sqrt()
    };

    Ok(GainThresholds { tau_t, tau_u })
}

/// Exact optimum of the relaxed assignment problem for fixed powers.
///
/// Elements are ranked by untrusted-coverage delivered per unit of trusted
/// gain sacrificed (`h_u[n] / h_t[n]`, descending; a zero trusted gain ranks
/// first as free coverage; ties break on the lower index). Coverage stops at
/// the untrusted deficit with one fractional pivot element; everything else
/// goes to the trusted user. In line-of-sight-only mode the reflector bank is
/// dark and the zero allocation is returned.
pub fn solve_relaxed(
    state: &ChannelState,
    thresholds: &GainThresholds,
    mode: LinkMode,
) -> Result<RelaxedAllocation, IrsAllocError> {
    let n = state.n_elements();
    if mode == LinkMode::LosOnly || n == 0 {
        return Ok(RelaxedAllocation {
            g_t: vec![0.0; n],
            g_u: vec![0.0; n],
        });
    }

    let h_u = state.h_tilde(User::Untrusted);
    let h_t = state.h_tilde(User::Trusted);
    let deficit = (thresholds.tau_u - state.h_los(User::Untrusted)).max(0.0);

    let mut g_u = vec![0.0; n];
    if deficit > 0.0 {
        if h_u.iter().sum::<f64>() < deficit {
            return Err(IrsAllocError::UntrustedUnreachable);
        }
        // Ratio sort via cross-multiplication: a before b iff
        // h_u[a] * h_t[b] > h_u[b] * h_t[a] (exact, division-free).
        let mut order: Vec<usize> = (0..n).filter(|&i| h_u[i] > 0.0).collect();
        order.sort_by(|&a, &b| {
            (h_u[b] * h_t[a])
                .partial_cmp(&(h_u[a] * h_t[b]))
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut covered = 0.0;
        for idx in order {
            let need = deficit - covered;
            if need <= 0.0 {
                break;
            }
            if h_u[idx] <= need {
                g_u[idx] = 1.0;
                covered += h_u[idx];
            } else {
                g_u[idx] = need / h_u[idx];
                covered = deficit;
            }
        }
    }

    let g_t: Vec<f64> = g_u.iter().map(|f| 1.0 - f).collect();
    let relaxed = RelaxedAllocation { g_t, g_u };
    if fractional_gain(state, User::Trusted, &relaxed.g_t) < thresholds.tau_t {
        return Err(IrsAllocError::TrustedUnreachable);
    }
    Ok(relaxed)
}

/// Round a fractional assignment to a binary one and repair feasibility.
///
/// Each element goes to the user holding the larger fraction (ties and
/// all-zero rows go to the trusted user). If rounding leaves the untrusted
/// user below its threshold, trusted-assigned elements are reassigned one at
/// a time, best coverage-per-sacrifice first, until the threshold is met.
pub fn round_greedy(
    relaxed: &RelaxedAllocation,
    state: &ChannelState,
    thresholds: &GainThresholds,
) -> Result<Allocation, IrsAllocError> {
    let n = relaxed.len();
    let h_u = state.h_tilde(User::Untrusted);
    let h_t = state.h_tilde(User::Trusted);

    let mut alloc = Allocation::zeros(n);
    for i in 0..n {
        if relaxed.g_u[i] > relaxed.g_t[i] {
            alloc.g_u[i] = true;
        } else {
            alloc.g_t[i] = true;
        }
    }

    let mut gain_u = alloc.gains(state, User::Untrusted);
    while gain_u < thresholds.tau_u {
        // Best trusted-assigned element by coverage per trusted gain lost.
        let mut pick: Option<usize> = None;
        for i in 0..n {
            if !alloc.g_t[i] || h_u[i] <= 0.0 {
                continue;
            }
            match pick {
                None => pick = Some(i),
                Some(best) => {
                    if h_u[i] * h_t[best] > h_u[best] * h_t[i] {
                        pick = Some(i);
                    }
                }
            }
        }
        let Some(i) = pick else {
            return Err(IrsAllocError::RoundingInfeasible);
        };
        alloc.g_t[i] = false;
        alloc.g_u[i] = true;
        gain_u += h_u[i];
    }

    if alloc.gains(state, User::Trusted) < thresholds.tau_t {
        return Err(IrsAllocError::TrustedUnreachable);
    }
    alloc.validate()?;
    Ok(alloc)
}
