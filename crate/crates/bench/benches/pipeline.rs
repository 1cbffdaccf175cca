//! Criterion benches over the hot paths: channel evaluation, the assignment
//! subproblem, one genetic power solve, and a full optimizer trial.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use luxsec_core::sim::{run_trial, trial_instance, Scenario};
use luxsec_core::{
    gain_thresholds, place_irs_grid, reflected_gains, round_greedy, solve_relaxed, GaConfig,
    LinkMode, PowerContext, PowerSplit, Vec3,
};

fn bench_scenario(n: usize) -> Scenario {
    let mut scn = Scenario::baseline();
    scn.grid = place_irs_grid(&scn.room, n, 0.1).unwrap();
    scn.mode = LinkMode::Combined;
    scn
}

fn channel_gains(c: &mut Criterion) {
    let scn = bench_scenario(80);
    let user = Vec3::new(2.1, 1.2, 0.85);
    c.bench_function("reflected_gains_n80", |b| {
        b.iter(|| reflected_gains(black_box(user), &scn.grid, &scn.room, &scn.optical).unwrap())
    });
}

fn assignment_subproblem(c: &mut Criterion) {
    let scn = bench_scenario(80);
    let inst = trial_instance(&scn, 0);
    let power = PowerSplit::new(0.15, 0.8, scn.p_led).unwrap();
    let thresholds = gain_thresholds(&power, &inst.noise, &inst.req, &inst.params).unwrap();
    c.bench_function("solve_and_round_n80", |b| {
        b.iter(|| {
            let relaxed = solve_relaxed(&inst.state, black_box(&thresholds), inst.mode).unwrap();
            round_greedy(&relaxed, &inst.state, &thresholds).unwrap()
        })
    });
}

fn genetic_power_solve(c: &mut Criterion) {
    let scn = bench_scenario(40);
    let inst = trial_instance(&scn, 0);
    let power = PowerSplit::new(0.15, 0.8, scn.p_led).unwrap();
    let thresholds = gain_thresholds(&power, &inst.noise, &inst.req, &inst.params).unwrap();
    let relaxed = solve_relaxed(&inst.state, &thresholds, inst.mode).unwrap();
    let alloc = round_greedy(&relaxed, &inst.state, &thresholds).unwrap();
    let ctx = PowerContext::from_allocation(&alloc, &inst.state, &inst.noise, &inst.req, &inst.params, inst.p_led);
    c.bench_function("ga_power_solve", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let cfg = GaConfig {
                seed,
                ..GaConfig::default()
            };
            luxsec_core::power_ga::run_adaptive_restart_ctx(black_box(&ctx), &cfg).unwrap()
        })
    });
}

fn full_trial(c: &mut Criterion) {
    let scn = bench_scenario(40);
    c.bench_function("optimizer_trial_n40", |b| {
        let mut trial = 0u64;
        b.iter(|| {
            trial += 1;
            run_trial(black_box(&scn), trial)
        })
    });
}

fn position_sampling(c: &mut Criterion) {
    let scn = bench_scenario(40);
    c.bench_function("sample_user_position", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| luxsec_core::sample_user_position(black_box(&scn.room), &mut rng))
    });
}

criterion_group!(
    benches,
    channel_gains,
    assignment_subproblem,
    genetic_power_solve,
    full_trial,
    position_sampling
);
criterion_main!(benches);
