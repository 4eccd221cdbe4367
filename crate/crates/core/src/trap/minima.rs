use log::warn;
use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::{lex_zyx, GridDims, SearchRegion, TrapError, TrapSite, TrapTolerances};
use crate::field::{field_hessian, FieldModel, GRADIENT_STEP, HESSIAN_STEP};
use crate::numeric::{brent_minimize, central_gradient, central_hessian, sorted_symmetric_eigen};
use crate::Point;

/// Minimum grid points per lattice period (`2α`) on each axis.
const POINTS_PER_PERIOD: f64 = 8.0;

/// Output of [`find_minima`], with counts of seeds that were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaReport {
    /// Sorted by `(z, y, x)`.
    pub sites: Vec<TrapSite>,
    pub seed_count: usize,
    pub dropped_unconverged: usize,
    pub dropped_escaped: usize,
    pub dropped_not_minimum: usize,
    /// Smallest `|B|` over the region boundary grid points.
    pub boundary_min: f64,
    pub clamped_points: usize,
}

enum Refined {
    Site(TrapSite),
    Unconverged,
    Escaped,
    NotMinimum,
}

fn validate_grid<M: FieldModel + ?Sized>(
    model: &M,
    region: &SearchRegion,
    grid: &GridDims,
) -> Result<(), TrapError> {
    region.validate()?;
    let alpha = model.length_scale();
    let max_spacing = 2.0 * alpha / POINTS_PER_PERIOD;
    let spacing = grid.spacing(region);
    for (axis, n) in grid.as_array().into_iter().enumerate() {
        if n < 3 {
            return Err(TrapError::InvalidGrid(format!(
                "need at least 3 points on axis {axis}, got {n}"
            )));
        }
        if spacing[axis] > max_spacing * (1.0 + 1e-12) {
            return Err(TrapError::InvalidGrid(format!(
                "spacing {:e} m on axis {axis} exceeds {max_spacing:e} m \
                 ({POINTS_PER_PERIOD} points per 2α period)",
                spacing[axis]
            )));
        }
    }
    if let Some(floor) = model.z_floor() {
        if region.min.z < floor {
            return Err(TrapError::InvalidRegion(format!(
                "region starts at z = {:e} m, below the film top at {floor:e} m",
                region.min.z
            )));
        }
    }
    Ok(())
}

/// Strict 26-neighbour minima of a scalar grid, in index order. Boundary points never qualify.
pub(crate) fn strict_grid_minima(values: &[f64], grid: &GridDims) -> Vec<usize> {
    let (nx, ny, nz) = (grid.nx, grid.ny, grid.nz);
    (0..grid.len())
        .into_par_iter()
        .filter(|&idx| {
            let (i, j, k) = grid.unindex(idx);
            if i == 0 || j == 0 || k == 0 || i + 1 == nx || j + 1 == ny || k + 1 == nz {
                return false;
            }
            let c = values[idx];
            if !c.is_finite() {
                return false;
            }
            for dk in 0..3 {
                for dj in 0..3 {
                    for di in 0..3 {
                        if di == 1 && dj == 1 && dk == 1 {
                            continue;
                        }
                        let n = grid.index(i + di - 1, j + dj - 1, k + dk - 1);
                        if values[n].is_nan() || values[n] <= c {
                            return false;
                        }
                    }
                }
            }
            true
        })
        .collect()
}

/// Eigen-decomposition of the `|B|` Hessian at a refined point.
fn curvature<M: FieldModel + ?Sized>(
    model: &M,
    p: &Point,
    zero_field: bool,
) -> Option<(Vector3<f64>, Matrix3<f64>)> {
    let hess = if zero_field {
        // the cone apex is not differentiable; report the raw stencil
        let h = model.length_scale() * HESSIAN_STEP;
        central_hessian(|q| model.magnitude(q).map(|v| v.magnitude), p, h).ok()?
    } else {
        field_hessian(model, p).ok()?
    };
    Some(sorted_symmetric_eigen(&hess))
}

fn refine<M: FieldModel + ?Sized>(
    model: &M,
    region: &SearchRegion,
    seed: Point,
    step0: f64,
    tol: &TrapTolerances,
) -> Refined {
    let alpha = model.length_scale();
    let hg = alpha * GRADIENT_STEP;
    let hh = alpha * HESSIAN_STEP;
    let f = |q: &Point| model.magnitude_squared(q);
    let f_or_inf = |q: &Point| {
        if region.contains(q) {
            f(q).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        }
    };

    let mut x = seed;
    let mut trust = step0;
    for _ in 0..tol.max_iters {
        if !region.contains(&x) {
            return Refined::Escaped;
        }
        let Ok(fx) = f(&x) else {
            return Refined::Escaped;
        };
        let b = fx.sqrt();
        if b < tol.zero_field_tol {
            return finish(model, x, b, true);
        }
        let Ok(g) = central_gradient(f, &x, hg) else {
            return Refined::Escaped;
        };
        if g.norm() / (2.0 * b) < tol.grad_tol {
            return finish(model, x, b, false);
        }
        let Ok(hess) = central_hessian(f, &x, hh) else {
            return Refined::Escaped;
        };

        let mut moved = false;
        if let Some(chol) = hess.cholesky() {
            let mut step = -chol.solve(&g);
            let len = step.norm();
            if len > trust {
                step *= trust / len;
            }
            let mut t = 1.0;
            while t > 1e-6 {
                let trial = x + step * t;
                if f_or_inf(&trial) < fx {
                    x = trial;
                    moved = true;
                    if t == 1.0 && len <= trust {
                        trust = trust.max(2.0 * len);
                    }
                    break;
                }
                t *= 0.5;
            }
        }
        if !moved {
            // coordinate descent fallback
            let mut best = fx;
            for axis in 0..3 {
                let mut e = Vector3::zeros();
                e[axis] = 1.0;
                let (t, ft) =
                    brent_minimize(|t| f_or_inf(&(x + e * t)), -trust, trust, 1e-9 * alpha, 100);
                if ft < best {
                    x += e * t;
                    best = ft;
                    moved = true;
                }
            }
            if !moved {
                trust *= 0.5;
                if trust < 1e-12 * alpha {
                    return Refined::Unconverged;
                }
            }
        }
    }
    Refined::Unconverged
}

fn finish<M: FieldModel + ?Sized>(model: &M, x: Point, b: f64, zero_field: bool) -> Refined {
    match curvature(model, &x, zero_field) {
        Some((values, axes)) => {
            if !zero_field && values[0] <= 0.0 {
                return Refined::NotMinimum;
            }
            Refined::Site(TrapSite {
                position: x,
                b_min: b,
                hessian_eigenvalues: values,
                hessian_axes: axes,
                band_index: 0,
                zero_field,
            })
        }
        None => Refined::Escaped,
    }
}

/// Evaluates `|B|` on the grid (x fastest). Returns magnitudes and the clamped count.
pub(crate) fn sample_grid<M: FieldModel + ?Sized>(
    model: &M,
    region: &SearchRegion,
    grid: &GridDims,
) -> Result<(Vec<f64>, usize), TrapError> {
    let samples: Vec<_> = (0..grid.len())
        .into_par_iter()
        .map(|idx| model.magnitude(&grid.point(region, idx)))
        .collect::<Result<_, _>>()?;
    let clamped = samples.iter().filter(|s| s.radicand_clamped).count();
    Ok((samples.into_iter().map(|s| s.magnitude).collect(), clamped))
}

/// Locates, refines and deduplicates the local minima of `|B|` inside `region`.
pub fn find_minima<M: FieldModel + ?Sized>(
    model: &M,
    region: &SearchRegion,
    grid: &GridDims,
    tol: &TrapTolerances,
) -> Result<MinimaReport, TrapError> {
    validate_grid(model, region, grid)?;
    let (values, clamped_points) = sample_grid(model, region, grid)?;

    let boundary_min = (0..grid.len())
        .filter(|&idx| {
            let (i, j, k) = grid.unindex(idx);
            i == 0 || j == 0 || k == 0 || i + 1 == grid.nx || j + 1 == grid.ny || k + 1 == grid.nz
        })
        .map(|idx| values[idx])
        .fold(f64::INFINITY, f64::min);

    let seeds = strict_grid_minima(&values, grid);
    let spacing = grid.spacing(region);
    let step0 = spacing.x.min(spacing.y).min(spacing.z);

    let refined: Vec<Refined> = seeds
        .par_iter()
        .map(|&idx| refine(model, region, grid.point(region, idx), step0, tol))
        .collect();

    let mut report = MinimaReport {
        sites: Vec::new(),
        seed_count: seeds.len(),
        dropped_unconverged: 0,
        dropped_escaped: 0,
        dropped_not_minimum: 0,
        boundary_min,
        clamped_points,
    };
    let mut kept: Vec<TrapSite> = Vec::new();
    for r in refined {
        match r {
            Refined::Site(site) => {
                match kept
                    .iter_mut()
                    .find(|k| (k.position - site.position).norm() <= tol.merge_radius)
                {
                    Some(existing) => {
                        if site.b_min < existing.b_min {
                            *existing = site;
                        }
                    }
                    None => kept.push(site),
                }
            }
            Refined::Unconverged => report.dropped_unconverged += 1,
            Refined::Escaped => report.dropped_escaped += 1,
            Refined::NotMinimum => report.dropped_not_minimum += 1,
        }
    }
    if report.dropped_unconverged > 0 {
        warn!(
            "{} minimum seeds did not converge within {} iterations and were dropped",
            report.dropped_unconverged, tol.max_iters
        );
    }
    if report.dropped_escaped > 0 {
        warn!(
            "{} minimum seeds left the search region during refinement and were dropped",
            report.dropped_escaped
        );
    }
    let zero = kept.iter().filter(|s| s.zero_field).count();
    if zero > 0 {
        warn!("{zero} trap sites have vanishing field (Majorana-unsafe)");
    }
    kept.sort_by(|a, b| lex_zyx(&a.position, &b.position));
    report.sites = kept;
    Ok(report)
}
