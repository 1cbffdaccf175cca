//! Optical channel gains: the Lambertian line-of-sight path and the cascaded
//! specular paths reflected off the wall-mounted elements.
//!
//! A reflected path behaves like a direct Lambertian link whose length is the
//! sum of the LED-to-element and element-to-user legs; a steered element
//! delivers that gain to the one user it serves and contributes nothing to the
//! other.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{cos_between, GeomError, IrsGrid, RoomConfig, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    /// Half-intensity angle outside (0, pi/2).
    #[error("half-intensity angle {0} rad outside (0, pi/2)")]
    BadHalfAngle(f64),
    /// Two points of a path coincide, leaving the direction undefined.
    #[error("degenerate geometry: coincident points on an optical path")]
    DegenerateGeometry,
    /// Gain vector and allocation vector lengths differ.
    #[error("shape mismatch: {expected} gains vs {got} allocation entries")]
    ShapeMismatch { expected: usize, got: usize },
}

impl From<GeomError> for ChannelError {
    fn from(_: GeomError) -> Self {
        ChannelError::DegenerateGeometry
    }
}

/// Which of the two paired users a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum User {
    Trusted,
    Untrusted,
}

/// Which propagation paths the receiver perceives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkMode {
    /// Direct paths only; the reflector bank is dark.
    LosOnly,
    /// Direct plus reflected paths.
    Combined,
    /// Reflected paths only (direct path blocked or aimed away).
    IrsOnly,
}

impl LinkMode {
    pub const ALL: [LinkMode; 3] = [LinkMode::LosOnly, LinkMode::Combined, LinkMode::IrsOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            LinkMode::LosOnly => "los_only",
            LinkMode::Combined => "combined",
            LinkMode::IrsOnly => "irs_only",
        }
    }
}

/// Receiver and emitter optics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpticalParams {
    /// Photodiode physical area, m^2.
    pub pd_area: f64,
    /// Receiver field of view, radians.
    pub fov: f64,
    /// LED half-intensity angle, radians.
    pub half_intensity: f64,
    /// Optical filter gain.
    pub filter_gain: f64,
    /// Concentrator refractive index.
    pub refractive_index: f64,
    /// Photodiode responsivity, A/W.
    pub responsivity: f64,
    /// Modulation bandwidth, Hz.
    pub bandwidth: f64,
    /// Evaluate the rate/secrecy expressions with the responsivity squared
    /// everywhere instead of the mixed first-power form (sensitivity switch).
    #[serde(default)]
    pub consistent_rho_squared: bool,
}

impl Default for OpticalParams {
    fn default() -> Self {
        Self {
            pd_area: 1e-4,
            fov: 85f64.to_radians(),
            half_intensity: 60f64.to_radians(),
            filter_gain: 1.0,
            refractive_index: 1.5,
            responsivity: 0.4,
            bandwidth: 20e6,
            consistent_rho_squared: false,
        }
    }
}

impl OpticalParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.pd_area > 0.0) {
            return Err("optical.pd_area: must be > 0".into());
        }
        if !(self.fov > 0.0 && self.fov <= std::f64::consts::FRAC_PI_2) {
            return Err("optical.fov: must satisfy 0 < fov <= pi/2".into());
        }
        if !(self.half_intensity > 0.0 && self.half_intensity < std::f64::consts::FRAC_PI_2) {
            return Err("optical.half_intensity: must satisfy 0 < angle < pi/2".into());
        }
        if !(self.filter_gain > 0.0) {
            return Err("optical.filter_gain: must be > 0".into());
        }
        if !(self.refractive_index >= 1.0) {
            return Err("optical.refractive_index: must be >= 1".into());
        }
        if !(self.responsivity > 0.0) {
            return Err("optical.responsivity: must be > 0".into());
        }
        if !(self.bandwidth > 0.0) {
            return Err("optical.bandwidth: must be > 0".into());
        }
        Ok(())
    }
}

/// Per-user direct gain and per-element reflected gain vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelState {
    pub h_los: [f64; 2],
    pub h_tilde: [Vec<f64>; 2],
}

impl ChannelState {
    pub fn n_elements(&self) -> usize {
        self.h_tilde[0].len()
    }

    pub fn h_los(&self, user: User) -> f64 {
        self.h_los[user_index(user)]
    }

    pub fn h_tilde(&self, user: User) -> &[f64] {
        &self.h_tilde[user_index(user)]
    }

    /// Full physical state for a user pair, with the non-perceived paths
    /// zeroed according to the link mode.
    pub fn compute(
        trusted_pos: Vec3,
        untrusted_pos: Vec3,
        room: &RoomConfig,
        grid: &IrsGrid,
        params: &OpticalParams,
        mode: LinkMode,
    ) -> Result<Self, ChannelError> {
        let mut h_los = [
            los_gain(trusted_pos, room, params)?,
            los_gain(untrusted_pos, room, params)?,
        ];
        let mut h_tilde = [
            reflected_gains(trusted_pos, grid, room, params)?,
            reflected_gains(untrusted_pos, grid, room, params)?,
        ];
        match mode {
            LinkMode::Combined => {}
            LinkMode::LosOnly => {
                for v in &mut h_tilde {
                    v.iter_mut().for_each(|g| *g = 0.0);
                }
            }
            LinkMode::IrsOnly => h_los = [0.0, 0.0],
        }
        Ok(Self { h_los, h_tilde })
    }
}

fn user_index(user: User) -> usize {
    match user {
        User::Trusted => 0,
        User::Untrusted => 1,
    }
}

/// Lambertian order `m = -1 / log2(cos(half_intensity))`.
pub fn lambertian_order(half_intensity: f64) -> Result<f64, ChannelError> {
    if !(half_intensity > 0.0 && half_intensity < std::f64::consts::FRAC_PI_2) {
        return Err(ChannelError::BadHalfAngle(half_intensity));
    }
    Ok(-1.0 / half_intensity.cos().log2())
}

/// Optical concentrator gain: `n^2 / sin^2(fov)` inside the field of view, 0 outside.
pub fn concentrator_gain(psi: f64, params: &OpticalParams) -> f64 {
    if (0.0..=params.fov).contains(&psi) {
        let s = params.fov.sin();
        params.refractive_index * params.refractive_index / (s * s)
    } else {
        0.0
    }
}

/// Shared Lambertian link evaluation: `A(m+1)/(2 pi L^2) * Gf * Gc * cos^m(phi) * cos(psi)`,
/// zero outside the field of view or outside the emission hemisphere.
fn lambertian_link(total_path: f64, cos_phi: f64, cos_psi: f64, params: &OpticalParams) -> Result<f64, ChannelError> {
    let m = lambertian_order(params.half_intensity)?;
    if cos_phi <= 0.0 || cos_psi < 0.0 {
        return Ok(0.0);
    }
    let psi = cos_psi.clamp(-1.0, 1.0).acos();
    if psi > params.fov {
        return Ok(0.0);
    }
    let gc = concentrator_gain(psi, params);
    let v = params.pd_area * (m + 1.0) / (2.0 * std::f64::consts::PI * total_path * total_path)
        * params.filter_gain
        * gc;
    Ok(v * cos_phi.powf(m) * cos_psi)
}

/// Direct line-of-sight gain from the LED to a user position.
pub fn los_gain(user_pos: Vec3, room: &RoomConfig, params: &OpticalParams) -> Result<f64, ChannelError> {
    let d = user_pos - room.led_pos;
    if d.norm() == 0.0 {
        return Err(ChannelError::DegenerateGeometry);
    }
    let cos_phi = cos_between(d, room.led_normal)?;
    // Incidence measured against the PD normal with the reversed direction.
    let cos_psi = cos_between(-d, room.pd_normal)?;
    lambertian_link(d.norm(), cos_phi, cos_psi, params)
}

/// Cascaded gains through each reflecting element for one user position.
///
/// Element `n` attenuates like a direct link of length `d(LED, n) + d(n, user)`
/// with the irradiance angle taken at the LED and the incidence angle at the
/// user. Elements reflect with unity reflectivity; an element outside the
/// user's field of view contributes zero.
pub fn reflected_gains(
    user_pos: Vec3,
    grid: &IrsGrid,
    room: &RoomConfig,
    params: &OpticalParams,
) -> Result<Vec<f64>, ChannelError> {
    let mut gains = Vec::with_capacity(grid.n_elements);
    for center in &grid.element_centers {
        let to_element = *center - room.led_pos;
        let to_user = user_pos - *center;
        let d1 = to_element.norm();
        let d2 = to_user.norm();
        if d1 == 0.0 || d2 == 0.0 {
            return Err(ChannelError::DegenerateGeometry);
        }
        let cos_phi = cos_between(to_element, room.led_normal)?;
        let cos_psi = cos_between(-to_user, room.pd_normal)?;
        gains.push(lambertian_link(d1 + d2, cos_phi, cos_psi, params)?);
    }
    Ok(gains)
}

/// Composite gain `h_los + sum_n h_tilde[n] * g[n]` for one user under a
/// binary element assignment.
pub fn effective_gain(state: &ChannelState, user: User, g: &[bool]) -> Result<f64, ChannelError> {
    let tilde = state.h_tilde(user);
    if tilde.len() != g.len() {
        return Err(ChannelError::ShapeMismatch {
            expected: tilde.len(),
            got: g.len(),
        });
    }
    let reflected: f64 = tilde
        .iter()
        .zip(g)
        .filter(|(_, &on)| on)
        .map(|(h, _)| h)
        .sum();
    Ok(state.h_los(user) + reflected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::place_irs_grid;

    fn approx_rel(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn lambertian_order_60_degrees_is_one() {
        let m = lambertian_order(60f64.to_radians()).unwrap();
        assert!((m - 1.0).abs() < 1e-12, "m = {m}");
    }

    #[test]
    fn lambertian_order_45_degrees_is_two() {
        let m = lambertian_order(45f64.to_radians()).unwrap();
        assert!((m - 2.0).abs() < 1e-12, "m = {m}");
    }

    #[test]
    fn lambertian_order_30_degrees() {
        // Frozen from an independent evaluation of the defining formula.
        let m = lambertian_order(30f64.to_radians()).unwrap();
        assert!(approx_rel(m, 4.818841679306421, 1e-12), "m = {m}");
    }

    #[test]
    fn lambertian_order_rejects_bad_angles() {
        assert!(matches!(lambertian_order(0.0), Err(ChannelError::BadHalfAngle(_))));
        assert!(matches!(
            lambertian_order(std::f64::consts::FRAC_PI_2),
            Err(ChannelError::BadHalfAngle(_))
        ));
    }

    #[test]
    fn concentrator_gain_unit_fov() {
        let params = OpticalParams {
            refractive_index: 1.5,
            fov: 90f64.to_radians(),
            ..OpticalParams::default()
        };
        assert!((concentrator_gain(30f64.to_radians(), &params) - 2.25).abs() < 1e-12);
    }

    #[test]
    fn concentrator_gain_outside_fov_is_zero() {
        let params = OpticalParams::default();
        assert_eq!(concentrator_gain(params.fov + 0.01, &params), 0.0);
    }

    #[test]
    fn concentrator_gain_60_degree_fov() {
        let params = OpticalParams {
            refractive_index: 1.5,
            fov: 60f64.to_radians(),
            ..OpticalParams::default()
        };
        let g = concentrator_gain(10f64.to_radians(), &params);
        assert!(approx_rel(g, 3.0, 1e-12), "Gc = {g}");
    }

    /// Room with the LED 2 m above the receiver plane and unit-gain optics, so
    /// the nadir gain reduces to A(m+1)/(2 pi d^2).
    fn plain_room_and_params() -> (RoomConfig, OpticalParams) {
        let room = RoomConfig {
            dims: Vec3::new(4.0, 4.0, 3.0),
            led_pos: Vec3::new(2.0, 2.0, 3.0),
            receiver_height: 1.0,
            ..RoomConfig::default()
        };
        let params = OpticalParams {
            pd_area: 1e-4,
            filter_gain: 1.0,
            refractive_index: 1.0,
            fov: 90f64.to_radians(),
            half_intensity: 60f64.to_radians(),
            ..OpticalParams::default()
        };
        (room, params)
    }

    #[test]
    fn los_gain_nadir_two_metres() {
        let (room, params) = plain_room_and_params();
        let h = los_gain(Vec3::new(2.0, 2.0, 1.0), &room, &params).unwrap();
        // Frozen: 1e-4 * 2 / (2 pi * 4) with both cosines = 1.
        assert!(approx_rel(h, 7.957747154594767e-6, 1e-12), "h = {h}");
    }

    #[test]
    fn los_gain_outside_fov_is_zero() {
        let (room, mut params) = plain_room_and_params();
        params.fov = 10f64.to_radians();
        // Far corner: incidence angle is atan(sqrt(8)/2) ~ 54.7 deg > 10 deg.
        let h = los_gain(Vec3::new(0.0, 0.0, 1.0), &room, &params).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn los_gain_inverse_square_on_axis() {
        let (mut room, params) = plain_room_and_params();
        room.dims.z = 5.0;
        room.led_pos = Vec3::new(2.0, 2.0, 5.0);
        let h1 = los_gain(Vec3::new(2.0, 2.0, 3.0), &room, &params).unwrap();
        let h2 = los_gain(Vec3::new(2.0, 2.0, 1.0), &room, &params).unwrap();
        assert!(approx_rel(h1 / h2, 4.0, 1e-12), "ratio = {}", h1 / h2);
    }

    #[test]
    fn los_gain_monotone_in_nadir_distance() {
        let (mut room, params) = plain_room_and_params();
        room.dims.z = 10.0;
        room.led_pos = Vec3::new(2.0, 2.0, 10.0);
        let mut prev = f64::INFINITY;
        for i in 1..40 {
            let z = 10.0 - 0.2 * i as f64;
            let h = los_gain(Vec3::new(2.0, 2.0, z), &room, &params).unwrap();
            assert!(h < prev, "gain must fall with distance (z = {z})");
            prev = h;
        }
    }

    #[test]
    fn los_gain_coincident_errors() {
        let (room, params) = plain_room_and_params();
        assert_eq!(
            los_gain(room.led_pos, &room, &params),
            Err(ChannelError::DegenerateGeometry)
        );
    }

    #[test]
    fn reflected_gain_matches_hand_evaluation() {
        // Single element placed so both legs and angles are known in closed form.
        let room = RoomConfig {
            dims: Vec3::new(4.0, 4.0, 3.0),
            led_pos: Vec3::new(2.0, 2.0, 3.0),
            receiver_height: 0.0,
            ..RoomConfig::default()
        };
        let params = plain_room_and_params().1;
        let grid = IrsGrid {
            n_elements: 1,
            element_centers: vec![Vec3::new(0.0, 2.0, 1.5)],
            wall_normal: Vec3::new(1.0, 0.0, 0.0),
        };
        let user = Vec3::new(1.0, 2.0, 0.0);
        let g = reflected_gains(user, &grid, &room, &params).unwrap();

        // Hand evaluation of the cascaded formula:
        let d1 = (2.0f64.powi(2) + 1.5f64.powi(2)).sqrt(); // LED -> element
        let d2 = (1.0f64.powi(2) + 1.5f64.powi(2)).sqrt(); // element -> user
        let cos_phi = 1.5 / d1;
        let cos_psi = 1.5 / d2;
        let expected =
            1e-4 * 2.0 / (2.0 * std::f64::consts::PI * (d1 + d2).powi(2)) * cos_phi * cos_psi;
        assert!(approx_rel(g[0], expected, 1e-12), "got {} want {expected}", g[0]);
    }

    #[test]
    fn reflected_gains_symmetric_pair_equal() {
        let room = RoomConfig::default();
        let params = OpticalParams::default();
        // Two elements mirrored about the room's y mid-plane; user on that plane.
        let grid = IrsGrid {
            n_elements: 2,
            element_centers: vec![Vec3::new(0.0, 1.0, 2.5), Vec3::new(0.0, 2.0, 2.5)],
            wall_normal: Vec3::new(1.0, 0.0, 0.0),
        };
        let g = reflected_gains(Vec3::new(2.0, 1.5, 0.85), &grid, &room, &params).unwrap();
        assert!(approx_rel(g[0], g[1], 1e-12), "{} vs {}", g[0], g[1]);
        assert!(g[0] > 0.0);
    }

    #[test]
    fn reflected_gains_fov_cutoff_zeroes_entry() {
        let room = RoomConfig::default();
        let mut params = OpticalParams::default();
        params.fov = 20f64.to_radians();
        // Low wall element far from the user: the ray arrives almost grazing
        // the receiver plane, well beyond a 20 degree FOV.
        let grid = IrsGrid {
            n_elements: 1,
            element_centers: vec![Vec3::new(0.0, 1.5, 1.0)],
            wall_normal: Vec3::new(1.0, 0.0, 0.0),
        };
        let g = reflected_gains(Vec3::new(2.5, 1.5, 0.85), &grid, &room, &params).unwrap();
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn reflected_equals_los_at_same_total_path_and_angles() {
        // Structural equality: a reflected path of total length L with given
        // cosines equals a direct path of length L with the same cosines.
        let (mut room, params) = plain_room_and_params();
        room.dims = Vec3::new(4.0, 4.0, 6.0);
        room.led_pos = Vec3::new(2.0, 2.0, 6.0);
        room.receiver_height = 1.0;

        // Reflected: LED at (2,2,6), element at (0,2,4.5) -> d1 = 2.5;
        // user at (2,2,3) -> d2 = 2.5; total 5.0.
        let grid = IrsGrid {
            n_elements: 1,
            element_centers: vec![Vec3::new(0.0, 2.0, 4.5)],
            wall_normal: Vec3::new(1.0, 0.0, 0.0),
        };
        let user = Vec3::new(2.0, 2.0, 3.0);
        let refl = reflected_gains(user, &grid, &room, &params).unwrap()[0];

        let d1 = 2.5f64;
        let d2 = 2.5f64;
        let cos_phi = 1.5 / d1; // LED normal is -z; element sits 1.5 below LED plane
        let cos_psi = 1.5 / d2; // user PD normal +z; element 1.5 above user plane
        let m = 1.0;
        let direct_equiv = params.pd_area * (m + 1.0)
            / (2.0 * std::f64::consts::PI * (d1 + d2).powi(2))
            * concentrator_gain(cos_psi.acos(), &params)
            * cos_phi.powf(m)
            * cos_psi;
        assert!(approx_rel(refl, direct_equiv, 1e-12));
    }

    #[test]
    fn effective_gain_empty_and_full() {
        let state = ChannelState {
            h_los: [2e-6, 1e-6],
            h_tilde: [vec![1e-7, 3e-7], vec![2e-7, 4e-7]],
        };
        let zeros = effective_gain(&state, User::Trusted, &[false, false]).unwrap();
        assert_eq!(zeros, 2e-6);
        let full = effective_gain(&state, User::Trusted, &[true, true]).unwrap();
        assert!(approx_rel(full, 2e-6 + 4e-7, 1e-15));
    }

    #[test]
    fn effective_gain_partial() {
        let state = ChannelState {
            h_los: [2e-6, 0.0],
            h_tilde: [vec![1e-7, 3e-7], vec![0.0, 0.0]],
        };
        let h = effective_gain(&state, User::Trusted, &[true, false]).unwrap();
        assert!(approx_rel(h, 2.1e-6, 1e-15));
    }

    #[test]
    fn effective_gain_shape_mismatch() {
        let state = ChannelState {
            h_los: [0.0, 0.0],
            h_tilde: [vec![1e-7], vec![1e-7]],
        };
        assert!(matches!(
            effective_gain(&state, User::Trusted, &[true, false]),
            Err(ChannelError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn effective_gain_monotone_in_allocation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let tilde: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1e-6)).collect();
            let state = ChannelState {
                h_los: [rng.gen_range(0.0..1e-5), 0.0],
                h_tilde: [tilde, vec![0.0; n]],
            };
            let mut g = vec![false; n];
            let mut prev = effective_gain(&state, User::Trusted, &g).unwrap();
            for i in 0..n {
                g[i] = true;
                let cur = effective_gain(&state, User::Trusted, &g).unwrap();
                assert!(cur >= prev);
                prev = cur;
            }
        }
    }

    #[test]
    fn mode_masking_zeroes_the_right_paths() {
        let room = RoomConfig::default();
        let params = OpticalParams::default();
        let grid = place_irs_grid(&room, 8, 0.1).unwrap();
        let t = Vec3::new(1.0, 1.0, 0.85);
        let u = Vec3::new(2.0, 2.0, 0.85);

        let full = ChannelState::compute(t, u, &room, &grid, &params, LinkMode::Combined).unwrap();
        assert!(full.h_los(User::Trusted) > 0.0);
        assert!(full.h_tilde(User::Trusted).iter().any(|&g| g > 0.0));

        let los = ChannelState::compute(t, u, &room, &grid, &params, LinkMode::LosOnly).unwrap();
        assert_eq!(los.h_los(User::Trusted), full.h_los(User::Trusted));
        assert!(los.h_tilde(User::Trusted).iter().all(|&g| g == 0.0));

        let irs = ChannelState::compute(t, u, &room, &grid, &params, LinkMode::IrsOnly).unwrap();
        assert_eq!(irs.h_los(User::Trusted), 0.0);
        assert_eq!(irs.h_tilde(User::Untrusted), full.h_tilde(User::Untrusted));
    }

    #[test]
    fn gains_are_nonnegative_everywhere() {
        use rand::{Rng, SeedableRng};
        let room = RoomConfig::default();
        let params = OpticalParams::default();
        let grid = place_irs_grid(&room, 20, 0.1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let pos = Vec3::new(
                rng.gen_range(0.0..room.dims.x),
                rng.gen_range(0.0..room.dims.y),
                room.receiver_height,
            );
            let h = los_gain(pos, &room, &params).unwrap();
            assert!(h >= 0.0);
            for g in reflected_gains(pos, &grid, &room, &params).unwrap() {
                assert!(g >= 0.0);
            }
        }
    }
}
