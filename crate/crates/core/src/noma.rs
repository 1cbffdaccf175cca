//! Power-domain NOMA arithmetic for the two-user pair: superposition power
//! split, post-SIC SINRs, the achievable-rate lower bound, and the secrecy
//! capacity of the trusted user.
//!
//! The untrusted user always takes the larger power and the first decoding
//! slot, so it decodes its own signal under interference from the trusted
//! user's signal, while the trusted user cancels the untrusted signal first.
//!
//! The rate and secrecy expressions are implemented exactly as printed in
//! their source, including the mixed first-power responsivity in the secrecy
//! formula and the bare interference term in the untrusted SINR. Setting
//! `OpticalParams::consistent_rho_squared` substitutes the squared
//! responsivity in both places for sensitivity analysis.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::OpticalParams;

const E_OVER_2PI: f64 = std::f64::consts::E / std::f64::consts::TAU;

#[derive(Debug, Error, PartialEq)]
pub enum NomaError {
    #[error("invalid power split: {0}")]
    InvalidPowerSplit(String),
}

/// NOMA power pair plus the transmit budget it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    /// Power assigned to the trusted user's signal, W.
    pub p_t: f64,
    /// Power assigned to the untrusted user's signal, W.
    pub p_u: f64,
    /// Total transmit budget, W.
    pub p_led: f64,
}

impl PowerSplit {
    pub fn new(p_t: f64, p_u: f64, p_led: f64) -> Result<Self, NomaError> {
        let split = Self { p_t, p_u, p_led };
        split.validate().map_err(NomaError::InvalidPowerSplit)?;
        Ok(split)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.p_t > 0.0) {
            return Err(format!("p_t = {} must be > 0", self.p_t));
        }
        if !(self.p_u > self.p_t) {
            return Err(format!("p_u = {} must exceed p_t = {}", self.p_u, self.p_t));
        }
        if !(self.p_t + self.p_u <= self.p_led) {
            return Err(format!(
                "p_t + p_u = {} exceeds budget {}",
                self.p_t + self.p_u,
                self.p_led
            ));
        }
        Ok(())
    }
}

/// Receiver AWGN standard deviations, A.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma_t: f64,
    pub sigma_u: f64,
}

impl NoiseModel {
    /// Equal-noise model derived from a transmit SNR in dB.
    pub fn from_transmit_snr_db(snr_db: f64, p_led: f64, responsivity: f64) -> Self {
        let sigma = noise_sigma_from_snr_db(snr_db, p_led, responsivity);
        Self {
            sigma_t: sigma,
            sigma_u: sigma,
        }
    }
}

/// Noise standard deviation for a transmit SNR defined as
/// `snr_db = 10 log10(rho * p_led / sigma)`.
pub fn noise_sigma_from_snr_db(snr_db: f64, p_led: f64, responsivity: f64) -> f64 {
    responsivity * p_led * 10f64.powf(-snr_db / 10.0)
}

/// Minimum rate requirements, bit/s.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateRequirements {
    pub r_min_t: f64,
    pub r_min_u: f64,
}

impl RateRequirements {
    pub fn validate(&self) -> Result<(), String> {
        if self.r_min_t < 0.0 || self.r_min_u < 0.0 {
            return Err("rate minimums must be >= 0".into());
        }
        Ok(())
    }
}

/// Post-SIC SINR of the trusted user: `rho^2 p_t^2 h_t^2 / sigma_t^2`.
pub fn sinr_trusted(h_t: f64, power: &PowerSplit, noise: &NoiseModel, params: &OpticalParams) -> f64 {
    let rho = params.responsivity;
    let signal = rho * power.p_t * h_t;
    signal * signal / (noise.sigma_t * noise.sigma_t)
}

/// SINR of the untrusted user decoding its own signal with the trusted
/// signal as interference: `rho^2 p_u^2 h_u^2 / (p_t^2 h_u^2 + sigma_u^2)`.
pub fn sinr_untrusted(h_u: f64, power: &PowerSplit, noise: &NoiseModel, params: &OpticalParams) -> f64 {
    let rho = params.responsivity;
    let rho_int = if params.consistent_rho_squared { rho * rho } else { 1.0 };
    let num = rho * rho * power.p_u * power.p_u * h_u * h_u;
    let den = rho_int * power.p_t * power.p_t * h_u * h_u + noise.sigma_u * noise.sigma_u;
    num / den
}

/// Achievable-rate lower bound `0.5 W log2(1 + (e / 2 pi) sinr)`, bit/s.
pub fn rate(sinr: f64, bandwidth: f64) -> f64 {
    0.5 * bandwidth * (1.0 + E_OVER_2PI * sinr).log2()
}

/// Secrecy-capacity lower bound of the trusted user, bit/s.
///
/// Returned raw (possibly negative); reporting layers clamp at zero while the
/// optimizers compare raw values.
pub fn secrecy_capacity(
    h_t: f64,
    h_u: f64,
    power: &PowerSplit,
    noise: &NoiseModel,
    params: &OpticalParams,
) -> f64 {
    let rho = if params.consistent_rho_squared {
        params.responsivity * params.responsivity
    } else {
        params.responsivity
    };
    let st2 = noise.sigma_t * noise.sigma_t;
    let su2 = noise.sigma_u * noise.sigma_u;
    let num = std::f64::consts::E * rho * power.p_t * power.p_t * h_t * h_t
        + std::f64::consts::TAU * st2;
    let den = rho * power.p_u * power.p_u * h_u * h_u + su2;
    0.5 * params.bandwidth * (su2 / (std::f64::consts::TAU * st2) * num / den).log2()
}
