//! Room geometry: 3D vectors, room/LED layout, reflector grid placement, and
//! random user placement on the receiver plane.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Geometry construction and evaluation errors.
#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    /// A direction vector with zero length was passed where an orientation is required.
    #[error("zero-length direction vector")]
    ZeroVector,
    /// The requested reflector grid does not fit on the wall.
    #[error("grid of {n} elements at pitch {pitch} m exceeds wall extents {wall_w} x {wall_h} m")]
    GridOverflow {
        n: usize,
        pitch: f64,
        wall_w: f64,
        wall_h: f64,
    },
}

/// A 3D point or direction in metres (unitless for unit normals).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector with the same direction, or `ZeroVector` for a null input.
    pub fn normalized(self) -> Result<Vec3, GeomError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(GeomError::ZeroVector);
        }
        Ok(Vec3::new(self.x / n, self.y / n, self.z / n))
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Room dimensions plus transmitter/receiver plane description.
///
/// The LED sits on the ceiling pointing down; photodiodes sit on a horizontal
/// receiver plane at `receiver_height`, pointing up.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoomConfig {
    /// Room extents in metres; the room occupies `[0, dims]` on each axis.
    pub dims: Vec3,
    pub led_pos: Vec3,
    /// Unit normal of the LED plane (points down into the room).
    pub led_normal: Vec3,
    /// Height of the receiver plane above the floor, metres.
    pub receiver_height: f64,
    /// Unit normal of the photodiode plane (points up).
    pub pd_normal: Vec3,
}

impl Default for RoomConfig {
    fn default() -> Self {
        let dims = Vec3::new(3.0, 3.0, 5.0);
        Self {
            dims,
            led_pos: Vec3::new(dims.x / 2.0, dims.y / 2.0, dims.z),
            led_normal: Vec3::new(0.0, 0.0, -1.0),
            receiver_height: 0.85,
            pd_normal: Vec3::new(0.0, 0.0, 1.0),
        }
    }
}

impl RoomConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.dims.x > 0.0 && self.dims.y > 0.0 && self.dims.z > 0.0) {
            return Err("room.dims: all extents must be > 0".into());
        }
        let p = self.led_pos;
        if p.x < 0.0 || p.x > self.dims.x || p.y < 0.0 || p.y > self.dims.y || p.z < 0.0 || p.z > self.dims.z {
            return Err("room.led_pos: must lie inside [0, dims]".into());
        }
        if !(self.receiver_height >= 0.0 && self.receiver_height < self.dims.z) {
            return Err("room.receiver_height: must satisfy 0 <= h < dims.z".into());
        }
        for (name, n) in [("led_normal", self.led_normal), ("pd_normal", self.pd_normal)] {
            if (n.norm() - 1.0).abs() > 1e-12 {
                return Err(format!("room.{name}: must be a unit vector"));
            }
        }
        Ok(())
    }
}

/// Positions of the reflecting elements, all lying on one wall plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrsGrid {
    pub n_elements: usize,
    pub element_centers: Vec<Vec3>,
    /// Unit normal of the wall, pointing into the room.
    pub wall_normal: Vec3,
}

impl IrsGrid {
    /// Grid with no elements (pure line-of-sight scenarios).
    pub fn empty() -> Self {
        Self {
            n_elements: 0,
            element_centers: Vec::new(),
            wall_normal: Vec3::new(1.0, 0.0, 0.0),
        }
    }
}

/// Cosine of the angle between direction `d` and unit normal `n`, clamped to [-1, 1].
pub fn cos_between(d: Vec3, n: Vec3) -> Result<f64, GeomError> {
    let len = d.norm();
    if len == 0.0 {
        return Err(GeomError::ZeroVector);
    }
    Ok((d.dot(n) / len).clamp(-1.0, 1.0))
}

/// Place `n` reflecting elements as a near-square grid on the `x = 0` wall.
///
/// The grid is centred horizontally and vertically on the wall. Elements fill
/// row-major from the top-left cell; with `n` short of a full rectangle the
/// trailing cells of the last row stay unused. Layout is deterministic for a
/// given `(room, n, pitch)`.
pub fn place_irs_grid(room: &RoomConfig, n: usize, pitch: f64) -> Result<IrsGrid, GeomError> {
    assert!(n >= 1, "grid needs at least one element");
    assert!(pitch > 0.0, "pitch must be positive");
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);

    let overflow = || GeomError::GridOverflow {
        n,
        pitch,
        wall_w: room.dims.y,
        wall_h: room.dims.z,
    };
    if (cols - 1) as f64 * pitch > room.dims.y || (rows - 1) as f64 * pitch > room.dims.z {
        return Err(overflow());
    }

    let mid_y = room.dims.y / 2.0;
    let mid_z = room.dims.z / 2.0;
    let mut centers = Vec::with_capacity(n);
    for idx in 0..n {
        let row = idx / cols;
        let col = idx % cols;
        let y = mid_y + (col as f64 - (cols - 1) as f64 / 2.0) * pitch;
        let z = mid_z + ((rows - 1) as f64 / 2.0 - row as f64) * pitch;
        if y < 0.0 || y > room.dims.y || z < 0.0 || z > room.dims.z {
            return Err(overflow());
        }
        centers.push(Vec3::new(0.0, y, z));
    }
    Ok(IrsGrid {
        n_elements: n,
        element_centers: centers,
        wall_normal: Vec3::new(1.0, 0.0, 0.0),
    })
}

/// Uniform sample over the floor rectangle at the receiver height.
pub fn sample_user_position<R: Rng + ?Sized>(room: &RoomConfig, rng: &mut R) -> Vec3 {
    let x = rng.gen_range(0.0..room.dims.x);
    let y = rng.gen_range(0.0..room.dims.y);
    Vec3::new(x, y, room.receiver_height)
}
