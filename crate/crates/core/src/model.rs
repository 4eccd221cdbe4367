//! Selection between the closed-form infinite lattice and the finite prism device.

use serde::{Deserialize, Serialize};

use crate::field::{BiasField, CrossTerm, FieldError, FieldModel, InfiniteLattice, LatticeParams};
use crate::magnetostatics::{FiniteLattice, FiniteLatticeSpec};

/// Geometry of one of the supported field models, without the bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LatticeModel {
    Infinite {
        params: LatticeParams,
        cross_term: CrossTerm,
    },
    Finite(FiniteLatticeSpec),
}

impl LatticeModel {
    pub fn m_z(&self) -> f64 {
        match self {
            Self::Infinite { params, .. } => params.m_z,
            Self::Finite(spec) => spec.m_z,
        }
    }

    pub fn with_m_z(&self, m_z: f64) -> Self {
        let mut out = *self;
        match &mut out {
            Self::Infinite { params, .. } => params.m_z = m_z,
            Self::Finite(spec) => spec.m_z = m_z,
        }
        out
    }

    pub fn surface_induction(&self) -> f64 {
        match self {
            Self::Infinite { params, .. } => params.surface_induction(),
            Self::Finite(spec) => spec.surface_induction(),
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Self::Infinite { params, .. } => params.alpha(),
            Self::Finite(spec) => spec.alpha(),
        }
    }

    pub fn film_top(&self) -> f64 {
        match self {
            Self::Infinite { params, .. } => params.film_top(),
            Self::Finite(spec) => spec.film_top_z,
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        match self {
            Self::Infinite { params, .. } => params.validate(),
            Self::Finite(spec) => spec.validate(),
        }
    }

    pub fn build(&self, bias: BiasField) -> Result<Box<dyn FieldModel + Send>, FieldError> {
        self.validate()?;
        Ok(match self {
            Self::Infinite { params, cross_term } => Box::new(InfiniteLattice {
                params: *params,
                bias,
                cross_term: *cross_term,
            }),
            Self::Finite(spec) => Box::new(FiniteLattice::new(spec, bias)?),
        })
    }
}
