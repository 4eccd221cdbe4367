//! Analytic test fields with known minima, saddles and curvatures.

use super::{FieldError, FieldModel, FieldValue};
use crate::Point;

/// `|B| = b`, everywhere.
#[derive(Debug, Clone, Copy)]
pub struct UniformField {
    pub magnitude: f64,
    pub length_scale: f64,
}

impl FieldModel for UniformField {
    fn magnitude(&self, _p: &Point) -> Result<FieldValue, FieldError> {
        Ok(FieldValue::exact(self.magnitude))
    }
    fn length_scale(&self) -> f64 {
        self.length_scale
    }
    fn field_scale(&self) -> f64 {
        self.magnitude.max(f64::MIN_POSITIVE)
    }
}

/// Isotropic well `|B| = b₀ + ½·k·|r − r₀|²`.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticWell {
    pub floor: f64,
    pub curvature: f64,
    pub center: Point,
    pub length_scale: f64,
}

impl FieldModel for QuadraticWell {
    fn magnitude(&self, p: &Point) -> Result<FieldValue, FieldError> {
        let d = p - self.center;
        Ok(FieldValue::exact(
            self.floor + 0.5 * self.curvature * d.norm_squared(),
        ))
    }
    fn length_scale(&self) -> f64 {
        self.length_scale
    }
    fn field_scale(&self) -> f64 {
        self.floor
            .max(0.5 * self.curvature * self.length_scale * self.length_scale)
    }
}

/// Double well along x, harmonic in y and z:
/// `|B| = b₀ + k·(s² − a²)² + ½·c·(t² + u²)` with `(s, t, u) = r − r₀`.
#[derive(Debug, Clone, Copy)]
pub struct DoubleWell {
    pub floor: f64,
    pub quartic: f64,
    pub half_separation: f64,
    pub transverse_curvature: f64,
    pub center: Point,
    pub length_scale: f64,
}

impl DoubleWell {
    /// Barrier height `k·a⁴` between the two wells.
    pub fn barrier(&self) -> f64 {
        self.quartic * self.half_separation.powi(4)
    }

    /// The two minima.
    pub fn wells(&self) -> [Point; 2] {
        let dx = Point::new(self.half_separation, 0.0, 0.0);
        [self.center - dx, self.center + dx]
    }
}

impl FieldModel for DoubleWell {
    fn magnitude(&self, p: &Point) -> Result<FieldValue, FieldError> {
        let d = p - self.center;
        let a2 = self.half_separation * self.half_separation;
        let s = d.x * d.x - a2;
        Ok(FieldValue::exact(
            self.floor
                + self.quartic * s * s
                + 0.5 * self.transverse_curvature * (d.y * d.y + d.z * d.z),
        ))
    }
    fn length_scale(&self) -> f64 {
        self.length_scale
    }
    fn field_scale(&self) -> f64 {
        self.floor.max(self.barrier())
    }
}
