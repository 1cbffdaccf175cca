//! `luxsec` - secrecy-capacity campaigns for an optical wireless downlink
//! with a steerable reflector bank and two-user NOMA.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use luxsec_cli::config::{ConfigFile, SweepAxis};
use luxsec_cli::{emit_results, execute, fmt9, init_thread_pool, CliError};
use luxsec_core::sim::{brute_force_oracle, trial_instance};
use luxsec_core::{optimize, LinkMode};

#[derive(Parser)]
#[command(name = "luxsec", version, about = "IRS-assisted NOMA VLC secrecy simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign (optionally swept) and write CSV results.
    Run(RunArgs),
    /// Validate a configuration file and print the resolved scenario.
    Check(CheckArgs),
    /// Exhaustive single-instance optimizer cross-check (small element counts).
    Oracle(OracleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModeArg {
    LosOnly,
    Combined,
    IrsOnly,
    All,
}

impl ModeArg {
    fn expand(self) -> Vec<LinkMode> {
        match self {
            ModeArg::LosOnly => vec![LinkMode::LosOnly],
            ModeArg::Combined => vec![LinkMode::Combined],
            ModeArg::IrsOnly => vec![LinkMode::IrsOnly],
            ModeArg::All => LinkMode::ALL.to_vec(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    /// Sweep the element count (defaults to 10, 20, 40, 80).
    N,
    /// Sweep the transmit SNR in dB (defaults to 60, 80, 100, 120).
    Snr,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Link mode(s) to simulate.
    #[arg(long)]
    mode: Option<ModeArg>,
    /// Sweep axis; values come from the config's sweep lists or the defaults.
    #[arg(long)]
    sweep: Option<SweepArg>,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default from config, else "results").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add per-trial brute-force cross-check columns (element count <= 8).
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trial index selecting the random placements.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Power grid resolution per axis.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long)]
    seed: Option<u64>,
}

fn load_config(path: &Option<PathBuf>) -> Result<(luxsec_core::Scenario, luxsec_cli::RunManifest), CliError> {
    match path {
        Some(p) => luxsec_cli::parse_config(p),
        None => luxsec_cli::resolve(ConfigFile::default(), None),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let (mut scenario, mut manifest) = load_config(&args.config)?;
    if let Some(trials) = args.trials {
        if trials < 1 {
            return Err(CliError::ConfigInvalid {
                detail: "trials: must be >= 1".into(),
            });
        }
        scenario.trials = trials;
        manifest.trials = trials;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
        manifest.seed = seed;
    }
    if let Some(out) = args.out {
        manifest.out_dir = out;
    }
    manifest.sweep = match args.sweep {
        None => SweepAxis::None,
        Some(SweepArg::N) => SweepAxis::NElements(
            manifest
                .declared_sweeps
                .n_elements
                .clone()
                .unwrap_or_else(|| vec![10, 20, 40, 80]),
        ),
        Some(SweepArg::Snr) => SweepAxis::SnrDb(
            manifest
                .declared_sweeps
                .snr_db
                .clone()
                .unwrap_or_else(|| vec![60.0, 80.0, 100.0, 120.0]),
        ),
    };
    let modes = args.mode.map(ModeArg::expand).unwrap_or_else(|| vec![scenario.mode]);

    let outcome = execute(&scenario, &manifest, &modes, args.oracle)?;
    let outputs = emit_results(&outcome, &manifest.out_dir)?;
    for path in &outputs {
        println!("wrote {}", path.display());
    }
    for row in &outcome.rows {
        let med = row
            .summary
            .map(|s| format!("median C_t {} bit/s", fmt9(s.median_c_t)))
            .unwrap_or_else(|| "all trials infeasible".to_string());
        println!(
            "{} N={} SNR={} dB: {} ({} infeasible / {} trials)",
            row.mode.as_str(),
            row.n_elements,
            row.snr_tx_db,
            med,
            row.infeasible_count,
            row.reports.len()
        );
    }
    if !outcome.any_feasible() {
        return Err(CliError::Infeasible(
            "every campaign in the run failed its rate constraints".into(),
        ));
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let (scenario, manifest) = luxsec_cli::parse_config(&args.config)?;
    println!("config ok: {}", args.config.display());
    println!(
        "  room {}x{}x{} m, led at ({}, {}, {}), receiver plane {} m",
        scenario.room.dims.x,
        scenario.room.dims.y,
        scenario.room.dims.z,
        scenario.room.led_pos.x,
        scenario.room.led_pos.y,
        scenario.room.led_pos.z,
        scenario.room.receiver_height
    );
    println!(
        "  {} elements, SNR {} dB, mode {}, {} trials, seed {}",
        scenario.grid.n_elements,
        scenario.snr_tx_db,
        scenario.mode.as_str(),
        scenario.trials,
        scenario.seed
    );
    println!(
        "  rate minimums {} / {} bit/s/Hz, out dir {}",
        scenario.req.r_min_t / scenario.optical.bandwidth,
        scenario.req.r_min_u / scenario.optical.bandwidth,
        manifest.out_dir.display()
    );
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let (mut scenario, _) = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if scenario.grid.n_elements > 8 {
        return Err(CliError::ConfigInvalid {
            detail: format!(
                "oracle requires n_elements <= 8, config has {}",
                scenario.grid.n_elements
            ),
        });
    }
    if !(2..=201).contains(&args.grid) {
        return Err(CliError::ConfigInvalid {
            detail: "grid: must lie in [2, 201]".into(),
        });
    }

    let inst = trial_instance(&scenario, args.trial);
    let oracle = brute_force_oracle(&inst, args.grid).map_err(|e| CliError::ConfigInvalid {
        detail: e.to_string(),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(args.trial);
    // Burn the two placement draws so the optimizer sees the trial stream.
    let _ = luxsec_core::sample_user_position(&scenario.room, &mut rng);
    let _ = luxsec_core::sample_user_position(&scenario.room, &mut rng);
    let report = optimize(&inst, &scenario.altopt, &mut rng);

    println!("trial {} ({} elements, SNR {} dB, mode {})", args.trial, scenario.grid.n_elements, scenario.snr_tx_db, scenario.mode.as_str());
    println!("  optimizer: C_t {} bit/s, feasible {}", fmt9(report.c_t), report.feasible);
    println!("  oracle:    C_t {} bit/s, feasible {}", fmt9(oracle.c_t), oracle.feasible);
    if oracle.feasible && oracle.c_t > 0.0 {
        println!("  ratio:     {:.6}", report.c_t / oracle.c_t);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_thread_pool().and_then(|()| match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Check(args) => cmd_check(args),
        Command::Oracle(args) => cmd_oracle(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
