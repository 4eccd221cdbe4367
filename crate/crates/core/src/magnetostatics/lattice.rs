//! Finite hole-array device: `m×m` blocks of `n×n` square holes.
//!
//! An infinite, uniformly z-magnetized film has no external field, so the
//! patterned film is the superposition of one `(0, 0, −M_z)` plug per hole.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::prism::{prism_field, PrismSpec};
use crate::constants::MU_0;
use crate::field::{BiasField, FieldError, FieldModel, FieldValue};
use crate::numeric::CompensatedVec3;
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteLatticeSpec {
    pub m_blocks: usize,
    pub n_holes: usize,
    pub alpha_h: f64,
    pub alpha_s: f64,
    pub tau: f64,
    /// Unpatterned border around the whole array; only used in finite-chip mode.
    pub wall_margin: f64,
    /// Edge-to-edge distance between the outermost holes of adjacent blocks.
    pub block_gap: f64,
    pub m_z: f64,
    pub film_top_z: f64,
    /// Adds one positive prism covering the chip footprint, so the chip has real edges.
    pub finite_chip: bool,
}

impl FiniteLatticeSpec {
    /// Spec with the default wall widths, film occupying `0 ≤ z ≤ τ`.
    pub fn new(
        m_blocks: usize,
        n_holes: usize,
        alpha_h: f64,
        alpha_s: f64,
        tau: f64,
        m_z: f64,
    ) -> Self {
        let pitch = alpha_h + alpha_s;
        Self {
            m_blocks,
            n_holes,
            alpha_h,
            alpha_s,
            tau,
            wall_margin: 2.0 * pitch,
            block_gap: pitch,
            m_z,
            film_top_z: tau,
            finite_chip: false,
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.m_blocks == 0 || self.n_holes == 0 {
            return Err(FieldError::InvalidParams(
                "m_blocks and n_holes must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("alpha_h", self.alpha_h),
            ("alpha_s", self.alpha_s),
            ("tau", self.tau),
            ("wall_margin", self.wall_margin),
            ("block_gap", self.block_gap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(FieldError::InvalidParams(format!(
                    "{name} must be positive and finite, got {v:e}"
                )));
            }
        }
        if !(self.m_z.is_finite() && self.m_z >= 0.0) {
            return Err(FieldError::InvalidParams(format!(
                "m_z must be non-negative and finite, got {:e}",
                self.m_z
            )));
        }
        if !self.film_top_z.is_finite() {
            return Err(FieldError::InvalidParams(
                "film_top_z must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Hole pitch within a block.
    pub fn pitch(&self) -> f64 {
        self.alpha_h + self.alpha_s
    }

    /// Lattice length scale `(α_h + α_s)/2`.
    pub fn alpha(&self) -> f64 {
        0.5 * self.pitch()
    }

    pub fn surface_induction(&self) -> f64 {
        MU_0 * self.m_z / std::f64::consts::PI
    }

    /// Sorted hole-center coordinates along one in-plane axis (x and y share them).
    pub fn hole_coordinates(&self) -> Vec<f64> {
        let n = self.n_holes;
        let block_width = n as f64 * self.alpha_h + (n as f64 - 1.0) * self.alpha_s;
        let block_pitch = block_width + self.block_gap;
        let mut coords = Vec::with_capacity(self.m_blocks * n);
        for b in 0..self.m_blocks {
            let block_center = (b as f64 - 0.5 * (self.m_blocks as f64 - 1.0)) * block_pitch;
            for i in 0..n {
                coords.push(block_center + (i as f64 - 0.5 * (n as f64 - 1.0)) * self.pitch());
            }
        }
        coords
    }

    /// Half-width of the patterned area, hole edges included.
    pub fn array_half_width(&self) -> f64 {
        let coords = self.hole_coordinates();
        coords.last().copied().unwrap_or(0.0) + 0.5 * self.alpha_h
    }
}

/// One `(0, 0, −M_z)` plug per hole, in row-major (y outer, x inner) order.
/// In finite-chip mode the footprint prism comes first.
pub fn build_hole_array(spec: &FiniteLatticeSpec) -> Vec<PrismSpec> {
    let coords = spec.hole_coordinates();
    let zc = spec.film_top_z - 0.5 * spec.tau;
    let half = Vector3::new(0.5 * spec.alpha_h, 0.5 * spec.alpha_h, 0.5 * spec.tau);
    let plug = Vector3::new(0.0, 0.0, -spec.m_z);
    let mut prisms = Vec::with_capacity(coords.len() * coords.len() + 1);
    if spec.finite_chip {
        let w = spec.array_half_width() + spec.wall_margin;
        prisms.push(PrismSpec::new(
            Point::new(0.0, 0.0, zc),
            Vector3::new(w, w, 0.5 * spec.tau),
            Vector3::new(0.0, 0.0, spec.m_z),
        ));
    }
    for &y in &coords {
        for &x in &coords {
            prisms.push(PrismSpec::new(Point::new(x, y, zc), half, plug));
        }
    }
    prisms
}

/// Vector field plus magnitude at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorSample {
    pub b: Vector3<f64>,
    pub magnitude: f64,
}

/// Superposition of prism fields plus a uniform bias.
#[derive(Debug, Clone)]
pub struct FiniteLattice {
    prisms: Vec<PrismSpec>,
    bias: BiasField,
    length_scale: f64,
    field_scale: f64,
    floor: Option<f64>,
}

impl FiniteLattice {
    pub fn new(spec: &FiniteLatticeSpec, bias: BiasField) -> Result<Self, FieldError> {
        spec.validate()?;
        Ok(Self {
            prisms: build_hole_array(spec),
            bias,
            length_scale: spec.alpha(),
            field_scale: spec.surface_induction(),
            floor: Some(spec.film_top_z),
        })
    }

    /// Arbitrary prism set; no floor is enforced beyond the prism surfaces.
    pub fn from_prisms(
        prisms: Vec<PrismSpec>,
        bias: BiasField,
        length_scale: f64,
        field_scale: f64,
    ) -> Self {
        Self {
            prisms,
            bias,
            length_scale,
            field_scale,
            floor: None,
        }
    }

    pub fn prisms(&self) -> &[PrismSpec] {
        &self.prisms
    }

    pub fn bias(&self) -> BiasField {
        self.bias
    }

    /// Field of the prisms alone, summed in list order with compensation.
    pub fn prism_sum(&self, p: &Point) -> Result<Vector3<f64>, FieldError> {
        let mut acc = CompensatedVec3::new();
        for prism in &self.prisms {
            acc.add(&prism_field(prism, p)?);
        }
        Ok(acc.value())
    }

    pub fn evaluate(&self, p: &Point) -> Result<VectorSample, FieldError> {
        if let Some(floor) = self.floor {
            if p.z <= floor {
                return Err(FieldError::BelowFilm { z: p.z, floor });
            }
        }
        let mut acc = CompensatedVec3::new();
        for prism in &self.prisms {
            acc.add(&prism_field(prism, p)?);
        }
        acc.add(&self.bias.as_vector());
        let b = acc.value();
        Ok(VectorSample {
            b,
            magnitude: b.norm(),
        })
    }
}

/// Builds the hole array for `spec` and evaluates `B` at one point.
pub fn evaluate_finite(
    spec: &FiniteLatticeSpec,
    bias: &BiasField,
    point: &Point,
) -> Result<VectorSample, FieldError> {
    FiniteLattice::new(spec, *bias)?.evaluate(point)
}

impl FieldModel for FiniteLattice {
    fn magnitude(&self, p: &Point) -> Result<FieldValue, FieldError> {
        self.evaluate(p).map(|s| FieldValue::exact(s.magnitude))
    }

    fn magnitude_squared(&self, p: &Point) -> Result<f64, FieldError> {
        self.evaluate(p).map(|s| s.b.norm_squared())
    }

    fn length_scale(&self) -> f64 {
        self.length_scale
    }

    fn field_scale(&self) -> f64 {
        self.field_scale
    }

    fn z_floor(&self) -> Option<f64> {
        self.floor
    }
}
