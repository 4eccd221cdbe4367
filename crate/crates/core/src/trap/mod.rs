//! Trap-site search and characterization for any [`FieldModel`](crate::field::FieldModel).
//!
//! Pipeline: grid scan for strict 26-neighbour minima → Newton refinement
//! on `|B|²` → deduplication → z-clustering into bands → saddle search for
//! in-band barriers and vertical band gaps.

mod analysis;
mod bands;
mod barrier;
mod minima;

pub use analysis::{analyze, InBandBarrier, TrapAnalysis};
pub use bands::{band_gaps, classify_bands, Band, BandGap};
pub use barrier::{barrier_between, BarrierResult, SEGMENT_SAMPLES};
pub use minima::{find_minima, MinimaReport};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, FieldModel};
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapError {
    #[error("invalid search grid: {0}")]
    InvalidGrid(String),
    #[error("invalid search region: {0}")]
    InvalidRegion(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Axis-aligned search box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub min: Point,
    pub max: Point,
}

impl SearchRegion {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn validate(&self) -> Result<(), TrapError> {
        for k in 0..3 {
            if !(self.min[k].is_finite() && self.max[k].is_finite()) {
                return Err(TrapError::InvalidRegion("bounds must be finite".into()));
            }
            if self.max[k] < self.min[k] {
                return Err(TrapError::InvalidRegion(format!("max < min on axis {k}")));
            }
        }
        Ok(())
    }
}

/// Grid points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl GridDims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self { nx, ny, nz }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    /// Linear index, x fastest.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        (
            idx % self.nx,
            (idx / self.nx) % self.ny,
            idx / (self.nx * self.ny),
        )
    }

    /// Grid point coordinates; an axis with a single point sits at the region minimum.
    pub fn point(&self, region: &SearchRegion, idx: usize) -> Point {
        let (i, j, k) = self.unindex(idx);
        let coord = |n: usize, lo: f64, hi: f64, m: usize| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * (m as f64) / ((n - 1) as f64)
            }
        };
        Point::new(
            coord(self.nx, region.min.x, region.max.x, i),
            coord(self.ny, region.min.y, region.max.y, j),
            coord(self.nz, region.min.z, region.max.z, k),
        )
    }

    pub fn spacing(&self, region: &SearchRegion) -> Vector3<f64> {
        let e = region.extent();
        let s = |n: usize, len: f64| if n <= 1 { 0.0 } else { len / (n - 1) as f64 };
        Vector3::new(s(self.nx, e.x), s(self.ny, e.y), s(self.nz, e.z))
    }
}

/// Convergence and clustering tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapTolerances {
    /// T/m, on `|∇|B||`.
    pub grad_tol: f64,
    /// m
    pub merge_radius: f64,
    /// m
    pub band_z_tolerance: f64,
    pub max_iters: usize,
    /// T; minima below this field are reported as zero-field sites.
    pub zero_field_tol: f64,
}

impl TrapTolerances {
    /// Defaults scaled to the model: `grad_tol = 10⁻⁶·B_o/α`, `merge_radius = 10⁻²·α`,
    /// `band_z_tolerance = α/4`, `zero_field_tol = 10⁻⁹·B_o`.
    pub fn for_scales(alpha: f64, b_o: f64) -> Self {
        Self {
            grad_tol: 1e-6 * b_o / alpha,
            merge_radius: 1e-2 * alpha,
            band_z_tolerance: 0.25 * alpha,
            max_iters: 200,
            zero_field_tol: 1e-9 * b_o,
        }
    }

    pub fn for_model<M: FieldModel + ?Sized>(model: &M) -> Self {
        Self::for_scales(model.length_scale(), model.field_scale())
    }
}

/// One refined local minimum of `|B|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSite {
    pub position: Point,
    /// T
    pub b_min: f64,
    /// Eigenvalues of the `|B|` Hessian, ascending (T/m²).
    pub hessian_eigenvalues: Vector3<f64>,
    /// Column `k` is the principal axis for eigenvalue `k`.
    pub hessian_axes: Matrix3<f64>,
    pub band_index: usize,
    /// `|B|` vanishes here (below `zero_field_tol`): spin-flip losses, no harmonic description.
    pub zero_field: bool,
}

fn lex_zyx(a: &Point, b: &Point) -> std::cmp::Ordering {
    a.z.total_cmp(&b.z)
        .then(a.y.total_cmp(&b.y))
        .then(a.x.total_cmp(&b.x))
}
