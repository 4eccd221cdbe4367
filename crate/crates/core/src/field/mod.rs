//! Field models and their finite-difference derivatives.
//!
//! Every model exposes `|B|` at a point through [`FieldModel`]; the trap
//! search and the atom physics only ever see that trait.

mod infinite;
pub mod synthetic;

pub use infinite::{
    evaluate_infinite, surface_induction, BiasField, CrossTerm, InfiniteLattice, LatticeParams,
};

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::numeric::{central_gradient, richardson_hessian};
use crate::Point;

/// Gradient step as a fraction of the model length scale.
pub const GRADIENT_STEP: f64 = 1e-5;
/// Hessian step as a fraction of the model length scale.
pub const HESSIAN_STEP: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),
    #[error("point z = {z:e} m lies below the film top at {floor:e} m")]
    BelowFilm { z: f64, floor: f64 },
    #[error("point ({x:e}, {y:e}, {z:e}) m is inside or on a magnetized prism")]
    InsidePrism { x: f64, y: f64, z: f64 },
    #[error("derivative requested at a clamped-radicand point ({x:e}, {y:e}, {z:e}) m")]
    ClampedPoint { x: f64, y: f64, z: f64 },
}

/// Field magnitude at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    /// `|B|` in tesla.
    pub magnitude: f64,
    /// True when the model's radicand was negative and clamped to zero.
    pub radicand_clamped: bool,
}

impl FieldValue {
    pub fn exact(magnitude: f64) -> Self {
        Self {
            magnitude,
            radicand_clamped: false,
        }
    }
}

/// A static magnetic field magnitude defined above a film.
pub trait FieldModel: Sync {
    fn magnitude(&self, p: &Point) -> Result<FieldValue, FieldError>;

    /// Characteristic lattice length `α` (m); sets finite-difference steps and tolerances.
    fn length_scale(&self) -> f64;

    /// Characteristic field `B_o` (T); sets gradient and zero-field tolerances.
    fn field_scale(&self) -> f64;

    /// Lowest admissible `z`, if the model has one.
    fn z_floor(&self) -> Option<f64> {
        None
    }

    /// `|B|²`, smooth even through field zeros.
    fn magnitude_squared(&self, p: &Point) -> Result<f64, FieldError> {
        self.magnitude(p).map(|v| v.magnitude * v.magnitude)
    }
}

fn check_unclamped<M: FieldModel + ?Sized>(model: &M, p: &Point) -> Result<(), FieldError> {
    if model.magnitude(p)?.radicand_clamped {
        return Err(FieldError::ClampedPoint {
            x: p.x,
            y: p.y,
            z: p.z,
        });
    }
    Ok(())
}

/// Central-difference gradient of `|B|` with step `α·10⁻⁵`.
pub fn field_gradient<M: FieldModel + ?Sized>(
    model: &M,
    p: &Point,
) -> Result<Vector3<f64>, FieldError> {
    check_unclamped(model, p)?;
    let h = model.length_scale() * GRADIENT_STEP;
    central_gradient(|q| model.magnitude(q).map(|v| v.magnitude), p, h)
}

/// Hessian of `|B|` from central differences at `α·10⁻³` and half that,
/// Richardson-extrapolated.
pub fn field_hessian<M: FieldModel + ?Sized>(
    model: &M,
    p: &Point,
) -> Result<Matrix3<f64>, FieldError> {
    check_unclamped(model, p)?;
    let h = model.length_scale() * HESSIAN_STEP;
    richardson_hessian(|q| model.magnitude(q).map(|v| v.magnitude), p, h)
}

impl<M: FieldModel + ?Sized> FieldModel for &M {
    fn magnitude(&self, p: &Point) -> Result<FieldValue, FieldError> {
        (**self).magnitude(p)
    }
    fn length_scale(&self) -> f64 {
        (**self).length_scale()
    }
    fn field_scale(&self) -> f64 {
        (**self).field_scale()
    }
    fn z_floor(&self) -> Option<f64> {
        (**self).z_floor()
    }
    fn magnitude_squared(&self, p: &Point) -> Result<f64, FieldError> {
        (**self).magnitude_squared(p)
    }
}

impl<M: FieldModel + ?Sized> FieldModel for Box<M>
where
    Box<M>: Sync,
{
    fn magnitude(&self, p: &Point) -> Result<FieldValue, FieldError> {
        (**self).magnitude(p)
    }
    fn length_scale(&self) -> f64 {
        (**self).length_scale()
    }
    fn field_scale(&self) -> f64 {
        (**self).field_scale()
    }
    fn z_floor(&self) -> Option<f64> {
        (**self).z_floor()
    }
    fn magnitude_squared(&self, p: &Point) -> Result<f64, FieldError> {
        (**self).magnitude_squared(p)
    }
}
