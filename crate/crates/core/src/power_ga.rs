//! Genetic search over the NOMA power pair for a fixed element assignment,
//! with elitism and adaptive restarts.
//!
//! Chromosomes encode the raw pair `(p_t, p_u)`; spending the whole budget is
//! not forced because the secrecy objective falls with the untrusted power.
//! Budget and ordering violations are repaired in place; rate-minimum
//! violations are penalized in the fitness so every infeasible chromosome
//! scores strictly below every feasible one.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{effective_gain, ChannelState, OpticalParams, User};
use crate::irs_alloc::Allocation;
use crate::noma::{rate, secrecy_capacity, sinr_trusted, sinr_untrusted, NoiseModel, PowerSplit, RateRequirements};

/// Multiple of the bandwidth used as the infeasibility penalty scale. Any
/// attainable secrecy value is orders of magnitude smaller, so penalized
/// fitness always ranks below feasible fitness.
const PENALTY_BANDWIDTHS: f64 = 1e4;

#[derive(Debug, Error, PartialEq)]
pub enum PowerGaError {
    #[error("no feasible power pair found in any generation")]
    NoFeasiblePower,
}

/// Genetic algorithm knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub n_generations: usize,
    /// Wall-clock budget; checked between generations only so completed
    /// generations stay deterministic.
    pub max_time_secs: f64,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub elite_count: usize,
    pub restart_rounds: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 40,
            n_generations: 50,
            max_time_secs: 5.0,
            crossover_prob: 0.8,
            mutation_prob: 0.1,
            elite_count: 2,
            restart_rounds: 4,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.population_size < 2 {
            return Err("ga.population_size: must be >= 2".into());
        }
        if self.elite_count >= self.population_size {
            return Err("ga.elite_count: must be < population_size".into());
        }
        for (name, p) in [("crossover_prob", self.crossover_prob), ("mutation_prob", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("ga.{name}: must lie in [0, 1]"));
            }
        }
        if self.restart_rounds < 1 {
            return Err("ga.restart_rounds: must be >= 1".into());
        }
        if self.n_generations < 1 {
            return Err("ga.n_generations: must be >= 1".into());
        }
        Ok(())
    }
}

/// Candidate power pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chromosome {
    pub p_t: f64,
    pub p_u: f64,
}

/// Everything the fitness needs once the assignment is fixed: the effective
/// gains are constants of the run.
#[derive(Debug, Clone)]
pub struct PowerContext {
    pub h_t: f64,
    pub h_u: f64,
    pub p_led: f64,
    pub noise: NoiseModel,
    pub req: RateRequirements,
    pub params: OpticalParams,
}

impl PowerContext {
    pub fn from_allocation(
        alloc: &Allocation,
        state: &ChannelState,
        noise: &NoiseModel,
        req: &RateRequirements,
        params: &OpticalParams,
        p_led: f64,
    ) -> Self {
        let h_t = effective_gain(state, User::Trusted, &alloc.g_t).expect("allocation matches state");
        let h_u = effective_gain(state, User::Untrusted, &alloc.g_u).expect("allocation matches state");
        Self {
            h_t,
            h_u,
            p_led,
            noise: *noise,
            req: *req,
            params: params.clone(),
        }
    }
}

fn fitness_in(ctx: &PowerContext, c: &Chromosome) -> (f64, bool) {
    let power = PowerSplit {
        p_t: c.p_t,
        p_u: c.p_u,
        p_led: ctx.p_led,
    };
    let w = ctx.params.bandwidth;
    let r_t = rate(sinr_trusted(ctx.h_t, &power, &ctx.noise, &ctx.params), w);
    let r_u = rate(sinr_untrusted(ctx.h_u, &power, &ctx.noise, &ctx.params), w);
    let ct = secrecy_capacity(ctx.h_t, ctx.h_u, &power, &ctx.noise, &ctx.params);
    let violation = (ctx.req.r_min_t - r_t).max(0.0) + (ctx.req.r_min_u - r_u).max(0.0);
    if violation > 0.0 {
        (ct - PENALTY_BANDWIDTHS * w * (1.0 + violation / w), false)
    } else {
        (ct, true)
    }
}

/// Fitness of a repaired chromosome: the raw secrecy value when both rate
/// minimums hold, a penalized value otherwise. The budget plays no role here;
/// it is enforced by [`repair`].
pub fn fitness(
    c: &Chromosome,
    alloc: &Allocation,
    state: &ChannelState,
    noise: &NoiseModel,
    req: &RateRequirements,
    params: &OpticalParams,
) -> f64 {
    let ctx = PowerContext::from_allocation(alloc, state, noise, req, params, c.p_t + c.p_u);
    fitness_in(&ctx, c).0
}

/// Project a chromosome onto the feasible power region:
/// sorted so `p_t < p_u`, clamped into `(0, p_led)` with an `eps` margin,
/// proportionally rescaled when the budget is exceeded, and nudged apart when
/// the two genes collide. Idempotent.
pub fn repair(c: &Chromosome, p_led: f64) -> Chromosome {
    let eps = 1e-6 * p_led;
    let (mut lo, mut hi) = if c.p_t <= c.p_u {
        (c.p_t, c.p_u)
    } else {
        (c.p_u, c.p_t)
    };
    lo = lo.clamp(eps, p_led - eps);
    hi = hi.clamp(eps, p_led - eps);
    if lo + hi > p_led {
        let s = p_led / (lo + hi);
        lo *= s;
        hi *= s;
    }
    if lo >= hi {
        let m = 0.5 * (lo + hi);
        if m > 2.0 * eps {
            lo = m - eps;
            hi = m + eps;
        } else {
            lo = m;
            hi = m + eps;
        }
    }
    // Clear any floating dust from the rescale; the eps gap dwarfs the ulps
    // removed here, so ordering survives.
    while lo + hi > p_led {
        hi = hi.next_down();
    }
    Chromosome { p_t: lo, p_u: hi }
}

fn random_chromosome<R: Rng>(rng: &mut R, p_led: f64) -> Chromosome {
    Chromosome {
        p_t: rng.gen_range(0.0..p_led),
        p_u: rng.gen_range(0.0..p_led),
    }
}

fn tournament<R: Rng>(rng: &mut R, scored: &[(Chromosome, f64)]) -> Chromosome {
    let i = rng.gen_range(0..scored.len());
    let j = rng.gen_range(0..scored.len());
    if scored[j].1 > scored[i].1 {
        scored[j].0
    } else {
        scored[i].0
    }
}

/// Indices of the `count` best chromosomes, fitness descending, ties to the
/// lower index.
fn elite_indices(scores: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    idx.truncate(count);
    idx
}

/// One generation: tournament selection, per-gene arithmetic crossover,
/// Gaussian mutation, repair, with the elite carried over unchanged.
pub fn evolve_generation<R: Rng>(
    pop: &[Chromosome],
    cfg: &GaConfig,
    rng: &mut R,
    ctx: &PowerContext,
) -> Vec<Chromosome> {
    let scored: Vec<(Chromosome, f64)> = pop.iter().map(|c| (*c, fitness_in(ctx, c).0)).collect();
    let scores: Vec<f64> = scored.iter().map(|(_, f)| *f).collect();

    let mut next: Vec<Chromosome> = elite_indices(&scores, cfg.elite_count)
        .into_iter()
        .map(|i| scored[i].0)
        .collect();

    let sigma = 0.1 * ctx.p_led;
    let normal = Normal::new(0.0, sigma).expect("positive mutation std");
    while next.len() < cfg.population_size {
        let a = tournament(rng, &scored);
        let b = tournament(rng, &scored);
        let (mut c1, mut c2) = if rng.gen::<f64>() < cfg.crossover_prob {
            // Arithmetic crossover with a fresh blend factor per gene.
            let bt: f64 = rng.gen();
            let bu: f64 = rng.gen();
            (
                Chromosome {
                    p_t: bt * a.p_t + (1.0 - bt) * b.p_t,
                    p_u: bu * a.p_u + (1.0 - bu) * b.p_u,
                },
                Chromosome {
                    p_t: (1.0 - bt) * a.p_t + bt * b.p_t,
                    p_u: (1.0 - bu) * a.p_u + bu * b.p_u,
                },
            )
        } else {
            (a, b)
        };
        for c in [&mut c1, &mut c2] {
            if rng.gen::<f64>() < cfg.mutation_prob {
                c.p_t += normal.sample(rng);
            }
            if rng.gen::<f64>() < cfg.mutation_prob {
                c.p_u += normal.sample(rng);
            }
        }
        next.push(repair(&c1, ctx.p_led));
        if next.len() < cfg.population_size {
            next.push(repair(&c2, ctx.p_led));
        }
    }
    next
}

/// Run the restart rounds and return the best feasible power pair seen.
///
/// Each restart reseeds the population with the elite of the previous round
/// plus fresh random chromosomes. Fully deterministic for a fixed
/// `cfg.seed`; the wall-clock budget is only consulted between generations.
pub fn run_adaptive_restart(
    alloc: &Allocation,
    state: &ChannelState,
    noise: &NoiseModel,
    req: &RateRequirements,
    params: &OpticalParams,
    p_led: f64,
    cfg: &GaConfig,
) -> Result<PowerSplit, PowerGaError> {
    let ctx = PowerContext::from_allocation(alloc, state, noise, req, params, p_led);
    run_adaptive_restart_ctx(&ctx, cfg)
}

/// As [`run_adaptive_restart`] but over a prebuilt context.
pub fn run_adaptive_restart_ctx(ctx: &PowerContext, cfg: &GaConfig) -> Result<PowerSplit, PowerGaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let deadline = Duration::from_secs_f64(cfg.max_time_secs);
    let started = Instant::now();

    let mut best: Option<(Chromosome, f64)> = None;
    let consider = |pop: &[Chromosome], best: &mut Option<(Chromosome, f64)>| {
        for c in pop {
            let (f, feasible) = fitness_in(ctx, c);
            if feasible && best.as_ref().is_none_or(|(_, bf)| f > *bf) {
                *best = Some((*c, f));
            }
        }
    };

    let mut carry: Vec<Chromosome> = Vec::new();
    'rounds: for _ in 0..cfg.restart_rounds {
        let mut pop = carry.clone();
        while pop.len() < cfg.population_size {
            pop.push(repair(&random_chromosome(&mut rng, ctx.p_led), ctx.p_led));
        }
        consider(&pop, &mut best);
        for _ in 0..cfg.n_generations {
            if started.elapsed() >= deadline {
                break 'rounds;
            }
            pop = evolve_generation(&pop, cfg, &mut rng, ctx);
            consider(&pop, &mut best);
        }
        let scores: Vec<f64> = pop.iter().map(|c| fitness_in(ctx, c).0).collect();
        carry = elite_indices(&scores, cfg.elite_count)
            .into_iter()
            .map(|i| pop[i])
            .collect();
    }

    let (c, _) = best.ok_or(PowerGaError::NoFeasiblePower)?;
    Ok(PowerSplit {
        p_t: c.p_t,
        p_u: c.p_u,
        p_led: ctx.p_led,
    })
}
