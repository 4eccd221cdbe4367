use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{barrier_between, BarrierResult, TrapError, TrapSite, TrapTolerances};
use crate::field::FieldModel;

/// A family of sites sharing an effective height above the film.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub index: usize,
    pub sites: Vec<TrapSite>,
    /// Positions of `sites` in the site table passed to [`classify_bands`].
    pub site_indices: Vec<usize>,
    pub z_centroid: f64,
    /// Lowest `b_min` in the band.
    pub b_floor: f64,
}

/// Field gap and vertical saddle between two adjacent bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandGap {
    pub lower_band: usize,
    pub upper_band: usize,
    /// `|b_floor(upper) − b_floor(lower)|`
    pub gap: f64,
    /// Barrier between the most nearly vertically aligned cross-band pair.
    pub vertical_barrier: f64,
    /// Site-table indices of that pair (lower band first).
    pub vertical_pair: (usize, usize),
    pub saddle: BarrierResult,
}

/// Clusters sites by height: sort by z and cut wherever consecutive heights
/// differ by more than `band_z_tolerance`. Band 0 is closest to the film.
/// Writes `band_index` into `sites`, which must already be sorted by `(z, y, x)`.
pub fn classify_bands(sites: &mut [TrapSite], band_z_tolerance: f64) -> Vec<Band> {
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| sites[a].position.z.total_cmp(&sites[b].position.z));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last_z = f64::NEG_INFINITY;
    for idx in order {
        let z = sites[idx].position.z;
        match groups.last_mut() {
            Some(g) if z - last_z <= band_z_tolerance => g.push(idx),
            _ => groups.push(vec![idx]),
        }
        last_z = z;
    }

    groups
        .into_iter()
        .enumerate()
        .map(|(band, mut members)| {
            members.sort_unstable();
            for &i in &members {
                sites[i].band_index = band;
            }
            let z_centroid =
                members.iter().map(|&i| sites[i].position.z).sum::<f64>() / members.len() as f64;
            let b_floor = members
                .iter()
                .map(|&i| sites[i].b_min)
                .fold(f64::INFINITY, f64::min);
            Band {
                index: band,
                sites: members.iter().map(|&i| sites[i]).collect(),
                site_indices: members,
                z_centroid,
                b_floor,
            }
        })
        .collect()
}

fn most_vertical_pair(lower: &Band, upper: &Band) -> Option<(usize, usize)> {
    let mut best: Option<((f64, f64), (usize, usize))> = None;
    for (a, sa) in lower.site_indices.iter().zip(&lower.sites) {
        for (b, sb) in upper.site_indices.iter().zip(&upper.sites) {
            let d = sb.position - sa.position;
            let key = (d.x.hypot(d.y), d.z.abs());
            let better = match best {
                None => true,
                Some((k, _)) => key.0 < k.0 || (key.0 == k.0 && key.1 < k.1),
            };
            if better {
                best = Some((key, (*a, *b)));
            }
        }
    }
    best.map(|(_, pair)| pair)
}

/// Gaps between each pair of adjacent bands. Empty for fewer than two bands.
pub fn band_gaps<M: FieldModel + ?Sized>(
    model: &M,
    sites: &[TrapSite],
    bands: &[Band],
    tol: &TrapTolerances,
) -> Result<Vec<BandGap>, TrapError> {
    bands
        .par_windows(2)
        .filter_map(|w| {
            let (lower, upper) = (&w[0], &w[1]);
            let (a, b) = most_vertical_pair(lower, upper)?;
            Some(
                barrier_between(model, &sites[a], &sites[b], tol).map(|saddle| BandGap {
                    lower_band: lower.index,
                    upper_band: upper.index,
                    gap: (upper.b_floor - lower.b_floor).abs(),
                    vertical_barrier: saddle.delta_b,
                    vertical_pair: (a, b),
                    saddle,
                }),
            )
        })
        .collect()
}
