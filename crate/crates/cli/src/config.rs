//! JSON scenario configuration: every field optional, module defaults fill
//! the gaps, validation errors name the offending field and constraint.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use luxsec_core::{place_irs_grid, AltOptConfig, GaConfig, LinkMode, OpticalParams, RateRequirements, RoomConfig, Scenario, Vec3};

use crate::CliError;

fn invalid(detail: impl Into<String>) -> CliError {
    CliError::ConfigInvalid {
        detail: detail.into(),
    }
}

/// On-disk configuration. Angles arrive in degrees, rate minimums in
/// bit/s/Hz; both are converted while resolving.
#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub room: RoomSection,
    #[serde(default)]
    pub optical: OpticalSection,
    pub n_elements: Option<usize>,
    pub element_pitch: Option<f64>,
    pub p_led: Option<f64>,
    pub snr_tx_db: Option<f64>,
    #[serde(default)]
    pub rate_min_bps_hz: RateMinSection,
    pub mode: Option<LinkMode>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub ga: GaSection,
    #[serde(default)]
    pub altopt: AltOptSection,
    #[serde(default)]
    pub sweep: SweepSection,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSection {
    pub dims: Option<[f64; 3]>,
    pub led_pos: Option<[f64; 3]>,
    pub led_normal: Option<[f64; 3]>,
    pub receiver_height: Option<f64>,
    pub pd_normal: Option<[f64; 3]>,
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalSection {
    pub pd_area: Option<f64>,
    pub fov_deg: Option<f64>,
    pub half_intensity_deg: Option<f64>,
    pub filter_gain: Option<f64>,
    pub refractive_index: Option<f64>,
    pub responsivity: Option<f64>,
    pub bandwidth: Option<f64>,
    pub consistent_rho_squared: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RateMinSection {
    pub trusted: Option<f64>,
    pub untrusted: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GaSection {
    pub population_size: Option<usize>,
    pub n_generations: Option<usize>,
    pub max_time_secs: Option<f64>,
    pub crossover_prob: Option<f64>,
    pub mutation_prob: Option<f64>,
    pub elite_count: Option<usize>,
    pub restart_rounds: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AltOptSection {
    /// Convergence tolerance in bit/s/Hz (scaled by the bandwidth).
    pub delta1_bps_hz: Option<f64>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub n_elements: Option<Vec<usize>>,
    pub snr_db: Option<Vec<f64>>,
}

/// Which scenario knob a sweep varies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SweepAxis {
    None,
    NElements(Vec<usize>),
    SnrDb(Vec<f64>),
}

/// Resolved run description: the base scenario plus everything the runner
/// needs to expand it into campaigns.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_path: Option<PathBuf>,
    pub sweep: SweepAxis,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub trials: usize,
    pub element_pitch: f64,
    /// Sweep lists as declared in the config, for the manifest echo.
    pub declared_sweeps: SweepSection,
}

pub fn parse_config(path: &Path) -> Result<(Scenario, RunManifest), CliError> {
    let text = std::fs::read_to_string(path).map_err(|_| CliError::ConfigNotFound(path.to_path_buf()))?;
    let file: ConfigFile =
        serde_json::from_str(&text).map_err(|e| invalid(format!("config parse error: {e}")))?;
    resolve(file, Some(path.to_path_buf()))
}

/// Apply defaults and validate. The sweep axis stays `None` here; the runner
/// selects it from the declared lists when asked to sweep.
pub fn resolve(file: ConfigFile, config_path: Option<PathBuf>) -> Result<(Scenario, RunManifest), CliError> {
    let defaults = Scenario::baseline();
    let vec3 = |a: [f64; 3]| Vec3::new(a[0], a[1], a[2]);

    let dims = file.room.dims.map(vec3).unwrap_or(defaults.room.dims);
    let room = RoomConfig {
        dims,
        led_pos: file
            .room
            .led_pos
            .map(vec3)
            .unwrap_or(Vec3::new(dims.x / 2.0, dims.y / 2.0, dims.z)),
        led_normal: file.room.led_normal.map(vec3).unwrap_or(defaults.room.led_normal),
        receiver_height: file.room.receiver_height.unwrap_or(defaults.room.receiver_height),
        pd_normal: file.room.pd_normal.map(vec3).unwrap_or(defaults.room.pd_normal),
    };
    room.validate().map_err(invalid)?;

    let d_opt = &defaults.optical;
    let optical = OpticalParams {
        pd_area: file.optical.pd_area.unwrap_or(d_opt.pd_area),
        fov: file
            .optical
            .fov_deg
            .map(f64::to_radians)
            .unwrap_or(d_opt.fov),
        half_intensity: file
            .optical
            .half_intensity_deg
            .map(f64::to_radians)
            .unwrap_or(d_opt.half_intensity),
        filter_gain: file.optical.filter_gain.unwrap_or(d_opt.filter_gain),
        refractive_index: file.optical.refractive_index.unwrap_or(d_opt.refractive_index),
        responsivity: file.optical.responsivity.unwrap_or(d_opt.responsivity),
        bandwidth: file.optical.bandwidth.unwrap_or(d_opt.bandwidth),
        consistent_rho_squared: file
            .optical
            .consistent_rho_squared
            .unwrap_or(d_opt.consistent_rho_squared),
    };
    optical.validate().map_err(invalid)?;

    let n_elements = file.n_elements.unwrap_or(defaults.grid.n_elements);
    let element_pitch = file.element_pitch.unwrap_or(0.1);
    if n_elements < 1 {
        return Err(invalid("n_elements: must be >= 1"));
    }
    if !(element_pitch > 0.0) {
        return Err(invalid("element_pitch: must be > 0"));
    }
    let grid = place_irs_grid(&room, n_elements, element_pitch)
        .map_err(|e| invalid(format!("n_elements/element_pitch: {e}")))?;

    let trials = file.trials.unwrap_or(defaults.trials);
    if trials < 1 {
        return Err(invalid("trials: must be >= 1"));
    }
    let p_led = file.p_led.unwrap_or(defaults.p_led);
    if !(p_led > 0.0) {
        return Err(invalid("p_led: must be > 0"));
    }

    let w = optical.bandwidth;
    let rate_t = file.rate_min_bps_hz.trusted.unwrap_or(0.5);
    let rate_u = file.rate_min_bps_hz.untrusted.unwrap_or(0.5);
    if rate_t < 0.0 || rate_u < 0.0 {
        return Err(invalid("rate_min_bps_hz: must be >= 0"));
    }

    let ga_default = GaConfig::default();
    let ga = GaConfig {
        population_size: file.ga.population_size.unwrap_or(ga_default.population_size),
        n_generations: file.ga.n_generations.unwrap_or(ga_default.n_generations),
        max_time_secs: file.ga.max_time_secs.unwrap_or(ga_default.max_time_secs),
        crossover_prob: file.ga.crossover_prob.unwrap_or(ga_default.crossover_prob),
        mutation_prob: file.ga.mutation_prob.unwrap_or(ga_default.mutation_prob),
        elite_count: file.ga.elite_count.unwrap_or(ga_default.elite_count),
        restart_rounds: file.ga.restart_rounds.unwrap_or(ga_default.restart_rounds),
        seed: 0,
    };
    ga.validate().map_err(|e| invalid(format!("ga.{e}")))?;

    let altopt = AltOptConfig {
        delta1: file.altopt.delta1_bps_hz.unwrap_or(1e-3) * w,
        max_iters: file.altopt.max_iters.unwrap_or(20),
        ga,
    };
    altopt.validate().map_err(invalid)?;

    if let Some(list) = &file.sweep.n_elements {
        validate_sweep_list(list, "sweep.n_elements")?;
    }
    if let Some(list) = &file.sweep.snr_db {
        validate_sweep_list(list, "sweep.snr_db")?;
    }

    let scenario = Scenario {
        room,
        grid,
        optical,
        p_led,
        snr_tx_db: file.snr_tx_db.unwrap_or(defaults.snr_tx_db),
        req: RateRequirements {
            r_min_t: rate_t * w,
            r_min_u: rate_u * w,
        },
        mode: file.mode.unwrap_or(LinkMode::Combined),
        trials,
        seed: file.seed.unwrap_or(defaults.seed),
        altopt,
    };
    scenario.validate().map_err(invalid)?;

    let manifest = RunManifest {
        config_path,
        sweep: SweepAxis::None,
        out_dir: file.out_dir.clone().unwrap_or_else(|| PathBuf::from("results")),
        seed: scenario.seed,
        trials,
        element_pitch,
        declared_sweeps: file.sweep,
    };
    Ok((scenario, manifest))
}

fn validate_sweep_list<T: PartialOrd + std::fmt::Debug>(list: &[T], field: &str) -> Result<(), CliError> {
    if list.is_empty() {
        return Err(invalid(format!("{field}: must be non-empty")));
    }
    for pair in list.windows(2) {
        if pair[1] <= pair[0] {
            return Err(invalid(format!(
                "{field}: must be strictly increasing, got {:?} after {:?}",
                pair[1], pair[0]
            )));
        }
    }
    Ok(())
}
