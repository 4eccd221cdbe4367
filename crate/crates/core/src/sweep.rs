//! Bias-field sweeps: re-run the trap analysis at each bias value and
//! record how sites, barriers and band gaps respond.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{BiasField, FieldError};
use crate::model::LatticeModel;
use crate::trap::{analyze, GridDims, SearchRegion, TrapAnalysis, TrapError, TrapTolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Trap(#[from] TrapError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasAxis {
    X,
    Y,
    Z,
}

impl BiasAxis {
    pub fn apply(self, bias: BiasField, value: f64) -> BiasField {
        let mut out = bias;
        match self {
            Self::X => out.bx = value,
            Self::Y => out.by = value,
            Self::Z => out.bz = value,
        }
        out
    }
}

/// `M_eff = M_z·max(0, 1 − χ·|b_z|/B_o)`; identity for `χ = 0`.
pub fn effective_magnetization(m_z: f64, chi: f64, bias_z: f64, b_o: f64) -> f64 {
    if chi == 0.0 {
        return m_z;
    }
    m_z * (1.0 - chi * bias_z.abs() / b_o).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub axis: BiasAxis,
    /// Tesla, strictly monotone.
    pub values: Vec<f64>,
    /// Demagnetization coefficient; 0 disables the magnetization reduction.
    pub chi: f64,
    pub region: SearchRegion,
    pub grid: GridDims,
    pub tolerances: TrapTolerances,
}

impl SweepPlan {
    pub fn validate(&self, base: &LatticeModel) -> Result<(), SweepError> {
        if self.values.is_empty() {
            return Err(SweepError::InvalidPlan("no bias values".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(SweepError::InvalidPlan("bias values must be finite".into()));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(SweepError::InvalidPlan(
                "bias values must be strictly monotone".into(),
            ));
        }
        if !(self.chi.is_finite() && self.chi >= 0.0) {
            return Err(SweepError::InvalidPlan(format!(
                "chi must be non-negative, got {}",
                self.chi
            )));
        }
        if self.chi > 0.0 && !(base.surface_induction() > 0.0) {
            return Err(SweepError::InvalidPlan(
                "chi > 0 needs a magnetized film (B_o > 0)".into(),
            ));
        }
        Ok(())
    }
}

/// Observables at one bias value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub bias_value: f64,
    pub bias: BiasField,
    /// A/m
    pub m_eff: f64,
    pub site_count: usize,
    pub band_count: usize,
    pub zero_field_count: usize,
    pub mean_delta_b: Option<f64>,
    pub min_delta_b: Option<f64>,
    /// Gap between bands `k` and `k + 1`, in band order.
    pub band_gaps: Vec<f64>,
    pub min_b_min: Option<f64>,
}

impl SweepRecord {
    pub fn from_analysis(bias_value: f64, bias: BiasField, m_eff: f64, a: &TrapAnalysis) -> Self {
        Self {
            bias_value,
            bias,
            m_eff,
            site_count: a.sites().len(),
            band_count: a.bands.len(),
            zero_field_count: a.zero_field_count(),
            mean_delta_b: a.mean_in_band_delta_b(),
            min_delta_b: a.min_in_band_delta_b(),
            band_gaps: a.band_gaps.iter().map(|g| g.gap).collect(),
            min_b_min: a.min_b_min(),
        }
    }
}

/// The model and bias actually analyzed at one plan value.
pub fn configure_point(
    base: &LatticeModel,
    base_bias: BiasField,
    axis: BiasAxis,
    value: f64,
    chi: f64,
) -> (LatticeModel, BiasField, f64) {
    let bias = axis.apply(base_bias, value);
    let m_eff = effective_magnetization(base.m_z(), chi, bias.bz, base.surface_induction());
    (base.with_m_z(m_eff), bias, m_eff)
}

/// Single-value analysis; the sweep is exactly this, once per plan value.
pub fn analyze_point(
    base: &LatticeModel,
    base_bias: BiasField,
    plan: &SweepPlan,
    value: f64,
) -> Result<(SweepRecord, TrapAnalysis), SweepError> {
    let (model, bias, m_eff) = configure_point(base, base_bias, plan.axis, value, plan.chi);
    let field = model.build(bias)?;
    let analysis = analyze(field.as_ref(), &plan.region, &plan.grid, &plan.tolerances)?;
    Ok((
        SweepRecord::from_analysis(value, bias, m_eff, &analysis),
        analysis,
    ))
}

/// One record per plan value, in plan order.
pub fn run_bias_sweep(
    base: &LatticeModel,
    base_bias: BiasField,
    plan: &SweepPlan,
) -> Result<Vec<SweepRecord>, SweepError> {
    plan.validate(base)?;
    plan.values
        .par_iter()
        .map(|&v| analyze_point(base, base_bias, plan, v).map(|(r, _)| r))
        .collect()
}
