//! Closed-form `|B|` above an infinite square lattice of holes in a
//! perpendicularly magnetized film, with uniform bias fields.
//!
//! With `B_o = μ₀M_z/π`, `β = π/α`, `E = e^{-β|z-τ|}` and `C = 1 - e^{-βτ}`:
//!
//! ```text
//! |B|² = |b|² + 2B_o²C²E² cos(βx)cos(βy)
//!        + 2·K·C·E·[(b_x + b_z)cos(βx) + (b_y + b_z)cos(βy)]
//! ```
//!
//! where `K = B_o` for the dimensionally consistent cross term (default)
//! and `K = B_o²` (numerically, in tesla) for the as-printed variant.

use serde::{Deserialize, Serialize};

use super::{FieldError, FieldModel, FieldValue};
use crate::constants::MU_0;
use crate::numeric::cos_pi;
use crate::Point;

/// Geometry and magnetization of the infinite lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub alpha_h: f64,
    pub alpha_s: f64,
    pub tau: f64,
    pub m_z: f64,
    pub symmetry_plane_z: f64,
}

impl LatticeParams {
    /// Equal hole size and spacing `alpha`, film thickness `tau`, magnetization `m_z` (A/m).
    pub fn new(alpha: f64, tau: f64, m_z: f64) -> Result<Self, FieldError> {
        Self::with_holes(alpha, alpha, tau, m_z)
    }

    /// Rejects `alpha_h != alpha_s`: the closed form only holds for equal hole size and spacing.
    pub fn with_holes(alpha_h: f64, alpha_s: f64, tau: f64, m_z: f64) -> Result<Self, FieldError> {
        let params = Self {
            alpha_h,
            alpha_s,
            tau,
            m_z,
            symmetry_plane_z: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(FieldError::InvalidParams(format!(
                    "{name} must be positive and finite, got {v:e}"
                )))
            }
        };
        positive("alpha_h", self.alpha_h)?;
        positive("alpha_s", self.alpha_s)?;
        positive("tau", self.tau)?;
        if !(self.m_z.is_finite() && self.m_z >= 0.0) {
            return Err(FieldError::InvalidParams(format!(
                "m_z must be non-negative and finite, got {:e}",
                self.m_z
            )));
        }
        if !self.symmetry_plane_z.is_finite() {
            return Err(FieldError::InvalidParams(
                "symmetry_plane_z must be finite".into(),
            ));
        }
        if (self.alpha_h - self.alpha_s).abs() > 1e-12 * self.alpha_h.max(self.alpha_s) {
            return Err(FieldError::InvalidParams(format!(
                "the infinite-lattice model requires alpha_h == alpha_s (got {:e} and {:e})",
                self.alpha_h, self.alpha_s
            )));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_h
    }

    /// `B_o = μ₀M_z/π` in tesla.
    pub fn surface_induction(&self) -> f64 {
        surface_induction(self)
    }

    /// `β = π/α` in 1/m.
    pub fn beta(&self) -> f64 {
        std::f64::consts::PI / self.alpha()
    }

    /// Height of the film top; the model is only evaluated at or above it.
    pub fn film_top(&self) -> f64 {
        self.symmetry_plane_z + self.tau
    }
}

/// `B_o = μ₀M_z/π`.
pub fn surface_induction(params: &LatticeParams) -> f64 {
    MU_0 * params.m_z / std::f64::consts::PI
}

/// Uniform external bias field in tesla.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BiasField {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl BiasField {
    pub fn new(bx: f64, by: f64, bz: f64) -> Self {
        Self { bx, by, bz }
    }

    pub fn z(bz: f64) -> Self {
        Self::new(0.0, 0.0, bz)
    }

    pub fn is_finite(&self) -> bool {
        self.bx.is_finite() && self.by.is_finite() && self.bz.is_finite()
    }

    pub fn norm_squared(&self) -> f64 {
        self.bx * self.bx + self.by * self.by + self.bz * self.bz
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn as_vector(&self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.bx, self.by, self.bz)
    }
}

/// Which prefactor multiplies the bias cross term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossTerm {
    /// `B_o¹`: dimensionally consistent.
    #[default]
    Dimensional,
    /// `B_o²` exactly as typeset, for comparison only.
    AsPrinted,
}

fn radicand(params: &LatticeParams, bias: &BiasField, cross: CrossTerm, p: &Point) -> f64 {
    let alpha = params.alpha();
    let b_o = params.surface_induction();
    let beta = params.beta();
    let depth = (p.z - params.film_top()).abs();
    let decay = (-beta * depth).exp();
    let film = 1.0 - (-beta * params.tau).exp();
    let cx = cos_pi(p.x / alpha);
    let cy = cos_pi(p.y / alpha);
    let k = match cross {
        CrossTerm::Dimensional => b_o,
        CrossTerm::AsPrinted => b_o * b_o,
    };
    let lattice = 2.0 * b_o * b_o * film * film * decay * decay * (cx * cy);
    let px = bias.bx + bias.bz;
    let py = bias.by + bias.bz;
    let mixed = 2.0 * k * film * decay * (px * cx + py * cy);
    bias.norm_squared() + lattice + mixed
}

/// Evaluates the closed-form magnitude with the dimensional cross term.
pub fn evaluate_infinite(
    params: &LatticeParams,
    bias: &BiasField,
    point: &Point,
) -> Result<FieldValue, FieldError> {
    InfiniteLattice::new(*params, *bias).magnitude(point)
}

/// The infinite-lattice model as a [`FieldModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteLattice {
    pub params: LatticeParams,
    pub bias: BiasField,
    pub cross_term: CrossTerm,
}

impl InfiniteLattice {
    pub fn new(params: LatticeParams, bias: BiasField) -> Self {
        Self {
            params,
            bias,
            cross_term: CrossTerm::Dimensional,
        }
    }

    pub fn as_printed(params: LatticeParams, bias: BiasField) -> Self {
        Self {
            params,
            bias,
            cross_term: CrossTerm::AsPrinted,
        }
    }

    fn check_domain(&self, p: &Point) -> Result<(), FieldError> {
        let floor = self.params.film_top();
        if p.z < floor {
            return Err(FieldError::BelowFilm { z: p.z, floor });
        }
        Ok(())
    }

    /// Raw radicand before clamping.
    pub fn radicand(&self, p: &Point) -> Result<f64, FieldError> {
        self.check_domain(p)?;
        Ok(radicand(&self.params, &self.bias, self.cross_term, p))
    }
}

impl FieldModel for InfiniteLattice {
    fn magnitude(&self, p: &Point) -> Result<FieldValue, FieldError> {
        let r = self.radicand(p)?;
        if r < 0.0 {
            Ok(FieldValue {
                magnitude: 0.0,
                radicand_clamped: true,
            })
        } else {
            Ok(FieldValue::exact(r.sqrt()))
        }
    }

    fn magnitude_squared(&self, p: &Point) -> Result<f64, FieldError> {
        Ok(self.radicand(p)?.max(0.0))
    }

    fn length_scale(&self) -> f64 {
        self.params.alpha()
    }

    fn field_scale(&self) -> f64 {
        self.params.surface_induction()
    }

    fn z_floor(&self) -> Option<f64> {
        Some(self.params.film_top())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{field_gradient, field_hessian};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const UM: f64 = 1e-6;

    fn default_params() -> LatticeParams {
        LatticeParams::new(1.0 * UM, 2.0 * UM, 1.4e5).unwrap()
    }

    #[test]
    fn surface_induction_values() {
        let mut p = default_params();
        assert_relative_eq!(surface_induction(&p), 5.6e-2, max_relative = 1e-15);
        p.m_z = 0.0;
        assert_eq!(surface_induction(&p), 0.0);
        p.m_z = PI / MU_0;
        assert_relative_eq!(surface_induction(&p), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn unequal_holes_rejected() {
        let err = LatticeParams::with_holes(1.0 * UM, 1.5 * UM, 2.0 * UM, 1e5).unwrap_err();
        assert!(err.to_string().contains("alpha_h == alpha_s"));
        assert!(LatticeParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(LatticeParams::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn bias_only_when_unmagnetized() {
        let mut p = default_params();
        p.m_z = 0.0;
        let bias = BiasField::new(1e-4, 0.0, 0.0);
        for pt in [
            Point::new(0.0, 0.0, 2.0 * UM),
            Point::new(0.3 * UM, -0.7 * UM, 3.1 * UM),
        ] {
            let v = evaluate_infinite(&p, &bias, &pt).unwrap();
            assert_relative_eq!(v.magnitude, 1e-4, max_relative = 1e-15);
            assert!(!v.radicand_clamped);
        }
    }

    #[test]
    fn zero_at_quarter_period_on_surface() {
        let p = default_params();
        let v = evaluate_infinite(
            &p,
            &BiasField::default(),
            &Point::new(0.5 * UM, 0.0, 2.0 * UM),
        )
        .unwrap();
        assert_eq!(v.magnitude, 0.0);
        assert!(!v.radicand_clamped);
    }

    #[test]
    fn surface_value_at_origin() {
        let p = default_params();
        let v = evaluate_infinite(&p, &BiasField::default(), &Point::new(0.0, 0.0, p.tau)).unwrap();
        let expected = 2f64.sqrt() * p.surface_induction() * (1.0 - (-p.beta() * p.tau).exp());
        assert_relative_eq!(v.magnitude, expected, max_relative = 1e-14);
    }

    #[test]
    fn below_film_is_domain_error() {
        let p = default_params();
        let err = evaluate_infinite(&p, &BiasField::default(), &Point::new(0.0, 0.0, 1.9 * UM))
            .unwrap_err();
        assert!(matches!(err, FieldError::BelowFilm { .. }));
    }

    #[test]
    fn negative_radicand_is_clamped_and_flagged() {
        let p = default_params();
        // cos(βx)cos(βy) = -1 with zero bias
        let v = evaluate_infinite(
            &p,
            &BiasField::default(),
            &Point::new(1.0 * UM, 0.0, 2.5 * UM),
        )
        .unwrap();
        assert_eq!(v.magnitude, 0.0);
        assert!(v.radicand_clamped);
    }

    #[test]
    fn as_printed_differs_only_through_cross_term() {
        let p = default_params();
        let pt = Point::new(0.2 * UM, 0.1 * UM, 3.0 * UM);
        let a = InfiniteLattice::new(p, BiasField::default())
            .magnitude(&pt)
            .unwrap();
        let b = InfiniteLattice::as_printed(p, BiasField::default())
            .magnitude(&pt)
            .unwrap();
        assert_eq!(a, b);
        let bias = BiasField::z(-5e-3);
        let a = InfiniteLattice::new(p, bias).magnitude(&pt).unwrap();
        let b = InfiniteLattice::as_printed(p, bias).magnitude(&pt).unwrap();
        assert!((a.magnitude - b.magnitude).abs() > 1e-6);
    }

    #[test]
    fn gradient_zero_for_uniform_field() {
        let mut p = default_params();
        p.m_z = 0.0;
        let model = InfiniteLattice::new(p, BiasField::new(1e-3, 2e-3, -1e-3));
        let pt = Point::new(0.1 * UM, 0.2 * UM, 2.5 * UM);
        assert_eq!(field_gradient(&model, &pt).unwrap().norm(), 0.0);
        assert_eq!(field_hessian(&model, &pt).unwrap().norm(), 0.0);
    }

    #[test]
    fn gradient_x_is_odd_in_x() {
        let p = default_params();
        let model = InfiniteLattice::new(p, BiasField::default());
        let z = p.tau + p.alpha();
        for x0 in [0.1 * UM, 0.23 * UM, 0.4 * UM] {
            let gp = field_gradient(&model, &Point::new(x0, 0.0, z)).unwrap();
            let gm = field_gradient(&model, &Point::new(-x0, 0.0, z)).unwrap();
            assert_relative_eq!(gp.x, -gm.x, max_relative = 1e-9);
        }
    }

    #[test]
    fn derivative_at_clamped_point_is_an_error() {
        let p = default_params();
        let model = InfiniteLattice::new(p, BiasField::default());
        let err = field_gradient(&model, &Point::new(1.0 * UM, 0.0, 2.5 * UM)).unwrap_err();
        assert!(matches!(err, FieldError::ClampedPoint { .. }));
    }
}
