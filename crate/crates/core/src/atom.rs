//! Single-particle trap physics for weak-field-seeking atoms.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{AMU, HBAR, K_B, MU_B, PLANCK};
use crate::field::{FieldError, FieldModel};
use crate::trap::{barrier_between, TrapAnalysis, TrapError, TrapSite, TrapTolerances};
use crate::Point;

/// Fewest profile samples accepted by [`wkb_transmission`].
pub const MIN_PROFILE_SAMPLES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("invalid species: {0}")]
    InvalidSpecies(String),
    #[error("non-positive Hessian eigenvalue {0:e} T/m²: not a harmonic minimum")]
    NonPositiveCurvature(f64),
    #[error("zero-field site has no harmonic description")]
    ZeroFieldSite,
    #[error("potential profile needs at least {MIN_PROFILE_SAMPLES} samples, got {0}")]
    ShortProfile(usize),
    #[error(transparent)]
    Trap(#[from] TrapError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    pub name: String,
    /// kg
    pub mass: f64,
    pub g_f: f64,
    pub m_f: f64,
}

impl AtomSpecies {
    /// ⁴⁰K, F = 9/2, m_F = 9/2.
    pub fn potassium_40() -> Self {
        Self {
            name: "K40".into(),
            mass: 39.964 * AMU,
            g_f: 2.0 / 9.0,
            m_f: 4.5,
        }
    }

    /// ⁶Li, F = 3/2, m_F = 3/2.
    pub fn lithium_6() -> Self {
        Self {
            name: "Li6".into(),
            mass: 6.015 * AMU,
            g_f: 2.0 / 3.0,
            m_f: 1.5,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "K40" | "40K" | "potassium-40" => Some(Self::potassium_40()),
            "Li6" | "6Li" | "lithium-6" => Some(Self::lithium_6()),
            _ => None,
        }
    }

    /// Magnetic moment `m_F·g_F·μ_B` (J/T).
    pub fn moment(&self) -> f64 {
        self.m_f * self.g_f * MU_B
    }

    /// Requires positive mass and a weak-field-seeking state.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(PhysicsError::InvalidSpecies(format!(
                "mass must be positive, got {:e} kg",
                self.mass
            )));
        }
        if !(self.moment() > 0.0) {
            return Err(PhysicsError::InvalidSpecies(format!(
                "{}: m_F·g_F must be positive for a weak-field seeker",
                self.name
            )));
        }
        Ok(())
    }
}

/// `U = m_F·g_F·μ_B·|B|`.
pub fn zeeman_energy(species: &AtomSpecies, b: f64) -> f64 {
    species.moment() * b
}

/// Harmonic angular frequencies along the site's principal axes.
pub fn trap_frequencies(
    species: &AtomSpecies,
    site: &TrapSite,
) -> Result<Vector3<f64>, PhysicsError> {
    if site.zero_field {
        return Err(PhysicsError::ZeroFieldSite);
    }
    harmonic_frequencies(species, &site.hessian_eigenvalues)
}

/// `ωᵢ = √(μ·λᵢ / m)`.
pub fn harmonic_frequencies(
    species: &AtomSpecies,
    eigenvalues: &Vector3<f64>,
) -> Result<Vector3<f64>, PhysicsError> {
    if let Some(&bad) = eigenvalues.iter().find(|&&l| !(l > 0.0)) {
        return Err(PhysicsError::NonPositiveCurvature(bad));
    }
    let mu = species.moment();
    Ok(eigenvalues.map(|l| (mu * l / species.mass).sqrt()))
}

/// Number of levels `(n + ½)ħω` strictly below `depth`.
pub fn bound_level_count(depth: f64, omega: f64) -> u64 {
    let quanta = depth / (HBAR * omega) - 0.5;
    if quanta.is_nan() || quanta <= 0.0 {
        0
    } else {
        quanta.ceil() as u64
    }
}

/// WKB tunnelling probability through a potential sampled uniformly over
/// `path_length`: `T = exp(−2∫√(2m(U − E))/ħ ds)` over the forbidden region,
/// trapezoid rule on the samples.
pub fn wkb_transmission(
    species: &AtomSpecies,
    profile: &[f64],
    path_length: f64,
    energy: f64,
) -> Result<f64, PhysicsError> {
    if profile.len() < MIN_PROFILE_SAMPLES {
        return Err(PhysicsError::ShortProfile(profile.len()));
    }
    let ds = path_length / (profile.len() - 1) as f64;
    let kappa = |u: f64| {
        if u > energy {
            (2.0 * species.mass * (u - energy)).sqrt() / HBAR
        } else {
            0.0
        }
    };
    let action: f64 = profile
        .windows(2)
        .map(|w| 0.5 * (kappa(w[0]) + kappa(w[1])) * ds)
        .sum();
    Ok((-2.0 * action).exp())
}

pub fn joule_to_microkelvin(e: f64) -> f64 {
    e / K_B * 1e6
}

pub fn microkelvin_to_joule(t: f64) -> f64 {
    t * 1e-6 * K_B
}

pub fn joule_to_kilohertz(e: f64) -> f64 {
    e / PLANCK * 1e-3
}

pub fn kilohertz_to_joule(f: f64) -> f64 {
    f * 1e3 * PLANCK
}

/// Zeeman potential sampled along the polyline `a → saddle → b`, uniformly in arc length.
/// Returns the samples and the total path length.
pub fn barrier_profile<M: FieldModel + ?Sized>(
    model: &M,
    species: &AtomSpecies,
    a: &Point,
    saddle: &Point,
    b: &Point,
    samples: usize,
) -> Result<(Vec<f64>, f64), PhysicsError> {
    let l1 = (saddle - a).norm();
    let l2 = (b - saddle).norm();
    let total = l1 + l2;
    let n = samples.max(2);
    let profile = (0..n)
        .map(|i| {
            let s = total * i as f64 / (n - 1) as f64;
            let p = if s <= l1 && l1 > 0.0 {
                a + (saddle - a) * (s / l1)
            } else if l2 > 0.0 {
                saddle + (b - saddle) * ((s - l1) / l2).min(1.0)
            } else {
                *saddle
            };
            model
                .magnitude(&p)
                .map(|v| zeeman_energy(species, v.magnitude))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((profile, total))
}

/// Harmonic description of one trap site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapCharacterization {
    pub site: usize,
    /// rad/s, along the Hessian principal axes.
    pub omegas: Vector3<f64>,
    /// J
    pub depth: f64,
    pub depth_microkelvin: f64,
    pub depth_kilohertz: f64,
    pub bound_levels: [u64; 3],
    /// Site index of the neighbour whose saddle limits the depth, if any.
    pub limiting_neighbour: Option<usize>,
}

/// Frequencies, depth and level counts for every non-zero-field site.
///
/// Depth is `μ·min(ΔB to the nearest site's saddle, min |B| on the region boundary − b_min)`.
pub fn characterize_traps<M: FieldModel + ?Sized>(
    model: &M,
    analysis: &TrapAnalysis,
    species: &AtomSpecies,
    tol: &TrapTolerances,
) -> Result<Vec<TrapCharacterization>, PhysicsError> {
    species.validate()?;
    let sites = analysis.sites();
    let escape = analysis.report.boundary_min;
    (0..sites.len())
        .into_par_iter()
        .filter(|&i| !sites[i].zero_field)
        .map(|i| {
            let site = &sites[i];
            let nearest = (0..sites.len()).filter(|&j| j != i).min_by(|&a, &b| {
                let da = (sites[a].position - site.position).norm();
                let db = (sites[b].position - site.position).norm();
                da.total_cmp(&db).then(a.cmp(&b))
            });
            let mut depth_b = (escape - site.b_min).max(0.0);
            let mut limiting = None;
            if let Some(j) = nearest {
                let saddle = barrier_between(model, site, &sites[j], tol)?;
                let own = (saddle.saddle_b - site.b_min).max(0.0);
                if own < depth_b {
                    depth_b = own;
                    limiting = Some(j);
                }
            }
            let omegas = trap_frequencies(species, site)?;
            let depth = zeeman_energy(species, depth_b);
            Ok(TrapCharacterization {
                site: i,
                omegas,
                depth,
                depth_microkelvin: joule_to_microkelvin(depth),
                depth_kilohertz: joule_to_kilohertz(depth),
                bound_levels: [
                    bound_level_count(depth, omegas[0]),
                    bound_level_count(depth, omegas[1]),
                    bound_level_count(depth, omegas[2]),
                ],
                limiting_neighbour: limiting,
            })
        })
        .collect()
}
