//! External field of a uniformly magnetized rectangular prism.
//!
//! Surface-charge model: each magnetization component `M_k` places charge
//! densities `±M_k` on the two faces normal to axis `k`. The field of a
//! uniformly charged rectangle has a closed form in logarithms and
//! arctangents, and outside the prism `B = μ₀H`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constants::MU_0;
use crate::field::FieldError;
use crate::Point;

/// Minimum distance (m) between an evaluation point and the prism surface.
pub const SURFACE_CLEARANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrismSpec {
    pub center: Point,
    pub half_extents: Vector3<f64>,
    /// A/m
    pub magnetization: Vector3<f64>,
}

impl PrismSpec {
    pub fn new(center: Point, half_extents: Vector3<f64>, magnetization: Vector3<f64>) -> Self {
        Self {
            center,
            half_extents,
            magnetization,
        }
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents.x * self.half_extents.y * self.half_extents.z
    }

    /// Euclidean distance from `p` to the closed box; zero inside.
    pub fn distance_to(&self, p: &Point) -> f64 {
        let r = p - self.center;
        let outside = Vector3::new(
            (r.x.abs() - self.half_extents.x).max(0.0),
            (r.y.abs() - self.half_extents.y).max(0.0),
            (r.z.abs() - self.half_extents.z).max(0.0),
        );
        outside.norm()
    }
}

/// `∫ dv / R` over `v ∈ [v1, v2]` at fixed `u`, i.e. `[ln(v + R)]`, written so
/// that neither branch cancels catastrophically.
fn log_span(u: f64, v1: f64, v2: f64, z: f64) -> f64 {
    let s = u * u + z * z;
    let r1 = (s + v1 * v1).sqrt();
    let r2 = (s + v2 * v2).sqrt();
    if v1 >= 0.0 {
        ((v2 + r2) / (v1 + r1)).ln()
    } else if v2 <= 0.0 {
        ((r1 - v1) / (r2 - v2)).ln()
    } else {
        ((v2 + r2) * (r1 - v1) / s).ln()
    }
}

fn corner_angle(u: f64, v: f64, z_abs: f64) -> f64 {
    let r = (u * u + v * v + z_abs * z_abs).sqrt();
    (u * v).atan2(z_abs * r)
}

/// Integrals of `(r_obs − r_src)/|r_obs − r_src|³` over a rectangle, in
/// local coordinates: `u ∈ [u1,u2]`, `v ∈ [v1,v2]` are source offsets from the
/// observer and `z` is the observer height above the rectangle plane.
fn rectangle_kernel(u1: f64, u2: f64, v1: f64, v2: f64, z: f64) -> [f64; 3] {
    let iu = log_span(u2, v1, v2, z) - log_span(u1, v1, v2, z);
    let iv = log_span(v2, u1, u2, z) - log_span(v1, u1, u2, z);
    let iz = if z == 0.0 {
        0.0
    } else {
        let za = z.abs();
        z.signum()
            * (corner_angle(u2, v2, za) - corner_angle(u1, v2, za) - corner_angle(u2, v1, za)
                + corner_angle(u1, v1, za))
    };
    [iu, iv, iz]
}

/// Exact external `B` (tesla) of a uniformly magnetized prism.
pub fn prism_field(prism: &PrismSpec, p: &Point) -> Result<Vector3<f64>, FieldError> {
    if prism.distance_to(p) <= SURFACE_CLEARANCE {
        return Err(FieldError::InsidePrism {
            x: p.x,
            y: p.y,
            z: p.z,
        });
    }
    let r = p - prism.center;
    let h = prism.half_extents;
    let mut b = Vector3::zeros();
    for k in 0..3 {
        let m = prism.magnetization[k];
        if m == 0.0 {
            continue;
        }
        let i = (k + 1) % 3;
        let j = (k + 2) % 3;
        let (u1, u2) = (-h[i] - r[i], h[i] - r[i]);
        let (v1, v2) = (-h[j] - r[j], h[j] - r[j]);
        let top = rectangle_kernel(u1, u2, v1, v2, r[k] - h[k]);
        let bottom = rectangle_kernel(u1, u2, v1, v2, r[k] + h[k]);
        b[i] += m * (top[0] - bottom[0]);
        b[j] += m * (top[1] - bottom[1]);
        b[k] += m * (top[2] - bottom[2]);
    }
    Ok(b * (MU_0 / (4.0 * std::f64::consts::PI)))
}
