use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    band_gaps, barrier_between, classify_bands, find_minima, Band, BandGap, BarrierResult,
    GridDims, MinimaReport, SearchRegion, TrapError, TrapSite, TrapTolerances,
};
use crate::field::FieldModel;

/// Barrier between a site and its nearest neighbour in the same band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InBandBarrier {
    pub band: usize,
    /// Site-table indices, `site_a < site_b`.
    pub site_a: usize,
    pub site_b: usize,
    pub result: BarrierResult,
}

/// Full trap analysis of one field configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapAnalysis {
    pub report: MinimaReport,
    pub bands: Vec<Band>,
    pub barriers: Vec<InBandBarrier>,
    pub band_gaps: Vec<BandGap>,
}

impl TrapAnalysis {
    pub fn sites(&self) -> &[TrapSite] {
        &self.report.sites
    }

    pub fn zero_field_count(&self) -> usize {
        self.sites().iter().filter(|s| s.zero_field).count()
    }

    pub fn min_b_min(&self) -> Option<f64> {
        self.sites().iter().map(|s| s.b_min).reduce(f64::min)
    }

    pub fn mean_in_band_delta_b(&self) -> Option<f64> {
        if self.barriers.is_empty() {
            return None;
        }
        let total: f64 = self.barriers.iter().map(|b| b.result.delta_b).sum();
        Some(total / self.barriers.len() as f64)
    }

    pub fn min_in_band_delta_b(&self) -> Option<f64> {
        self.barriers
            .iter()
            .map(|b| b.result.delta_b)
            .reduce(f64::min)
    }
}

/// Unique nearest-neighbour pairs within each band, sorted.
fn nearest_neighbour_pairs(sites: &[TrapSite], bands: &[Band]) -> Vec<(usize, usize, usize)> {
    let mut pairs = Vec::new();
    for band in bands {
        for &i in &band.site_indices {
            let nearest = band
                .site_indices
                .iter()
                .filter(|&&j| j != i)
                .min_by(|&&a, &&b| {
                    let da = (sites[a].position - sites[i].position).norm();
                    let db = (sites[b].position - sites[i].position).norm();
                    da.total_cmp(&db).then(a.cmp(&b))
                });
            if let Some(&j) = nearest {
                pairs.push((band.index, i.min(j), i.max(j)));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Minima → bands → in-band nearest-neighbour barriers → band gaps.
pub fn analyze<M: FieldModel + ?Sized>(
    model: &M,
    region: &SearchRegion,
    grid: &GridDims,
    tol: &TrapTolerances,
) -> Result<TrapAnalysis, TrapError> {
    let mut report = find_minima(model, region, grid, tol)?;
    let bands = classify_bands(&mut report.sites, tol.band_z_tolerance);
    let sites = &report.sites;
    let barriers = nearest_neighbour_pairs(sites, &bands)
        .into_par_iter()
        .map(|(band, a, b)| {
            barrier_between(model, &sites[a], &sites[b], tol).map(|result| InBandBarrier {
                band,
                site_a: a,
                site_b: b,
                result,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let band_gaps = band_gaps(model, sites, &bands, tol)?;
    Ok(TrapAnalysis {
        report,
        bands,
        barriers,
        band_gaps,
    })
}
