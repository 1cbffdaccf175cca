//! Secrecy-capacity simulator for an indoor optical wireless downlink where a
//! bank of wall-mounted steerable reflecting elements and a two-user NOMA
//! power split are optimized jointly to protect a trusted user from an
//! untrusted one.
//!
//! Pipeline, bottom to top:
//!
//! * [`geom`]: room layout, reflector grid placement, user sampling;
//! * [`channel`]: Lambertian line-of-sight and cascaded reflected gains;
//! * [`noma`]: SINRs, achievable-rate lower bound, secrecy capacity;
//! * [`irs_alloc`]: element assignment for fixed powers (exact relaxed
//!   optimum plus greedy rounding);
//! * [`power_ga`]: adaptive-restart genetic search over the power pair;
//! * [`altopt`]: the alternating loop tying both subproblems together;
//! * [`sim`]: Monte Carlo campaigns and the exhaustive reference optimizer.

pub mod altopt;
pub mod channel;
pub mod geom;
pub mod irs_alloc;
pub mod noma;
pub mod power_ga;
pub mod sim;

pub use altopt::{optimize, AltOptConfig, ProblemInstance, SecrecyReport};
pub use channel::{
    concentrator_gain, effective_gain, lambertian_order, los_gain, reflected_gains, ChannelError,
    ChannelState, LinkMode, OpticalParams, User,
};
pub use geom::{cos_between, place_irs_grid, sample_user_position, GeomError, IrsGrid, RoomConfig, Vec3};
pub use irs_alloc::{
    gain_thresholds, round_greedy, solve_relaxed, Allocation, GainThresholds, IrsAllocError,
    RelaxedAllocation,
};
pub use noma::{
    noise_sigma_from_snr_db, rate, secrecy_capacity, sinr_trusted, sinr_untrusted, NoiseModel,
    NomaError, PowerSplit, RateRequirements,
};
pub use power_ga::{
    evolve_generation, fitness, repair, run_adaptive_restart, Chromosome, GaConfig, PowerContext,
    PowerGaError,
};
pub use sim::{
    assemble_campaign, brute_force_oracle, run_campaign, run_campaign_with_baseline, run_reports,
    run_trial, CampaignResult, CampaignSummary, Scenario, SimError,
};
