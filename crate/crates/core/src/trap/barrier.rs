use nalgebra::{Matrix2, SymmetricEigen, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::{lex_zyx, TrapError, TrapSite, TrapTolerances};
use crate::field::FieldModel;
use crate::numeric::{brent_minimize, local_minimize};
use crate::Point;

/// Transverse planes marched across the segment to seed the saddle search.
pub const SEGMENT_SAMPLES: usize = 512;
const MAX_ROUNDS: usize = 100;

/// Saddle between two sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierResult {
    /// `|B|(saddle) − max(b_min_a, b_min_b)`, never negative.
    pub delta_b: f64,
    pub saddle_position: Point,
    pub saddle_b: f64,
    /// The two sites coincide within `merge_radius`.
    pub same_site: bool,
}

fn transverse_basis(dir: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut least = 0;
    for k in 1..3 {
        if dir[k].abs() < dir[least].abs() {
            least = k;
        }
    }
    let mut axis = Vector3::zeros();
    axis[least] = 1.0;
    let e1 = dir.cross(&axis).normalize();
    let e2 = dir.cross(&e1).normalize();
    (e1, e2)
}

/// Eigenvectors of the in-plane Hessian of `f` at `c`, or the coordinate axes
/// where the curvature is not usable.
fn principal_axes(f: &impl Fn(Vector2<f64>) -> f64, c: Vector2<f64>, h: f64) -> [Vector2<f64>; 2] {
    let fallback = [Vector2::x(), Vector2::y()];
    let (ex, ey) = (Vector2::new(h, 0.0), Vector2::new(0.0, h));
    let f0 = f(c);
    let hxx = (f(c + ex) - 2.0 * f0 + f(c - ex)) / (h * h);
    let hyy = (f(c + ey) - 2.0 * f0 + f(c - ey)) / (h * h);
    let hxy = (f(c + ex + ey) - f(c + ex - ey) - f(c - ex + ey) + f(c - ex - ey)) / (4.0 * h * h);
    let m = Matrix2::new(hxx, hxy, hxy, hyy);
    if !m.iter().all(|x| x.is_finite()) {
        return fallback;
    }
    let eig = SymmetricEigen::new(m);
    let (a, b) = (eig.eigenvectors.column(0), eig.eigenvectors.column(1));
    if a.iter().chain(b.iter()).all(|x| x.is_finite()) {
        // fix signs so the axes do not depend on the solver's choice
        let canon = |v: Vector2<f64>| {
            if v.x < 0.0 || (v.x == 0.0 && v.y < 0.0) {
                -v
            } else {
                v
            }
        };
        [canon(a.into_owned()), canon(b.into_owned())]
    } else {
        fallback
    }
}

/// Saddle height between two minima of the same field.
///
/// The segment `a → b` is cut by [`SEGMENT_SAMPLES`] transverse planes. In
/// each plane `|B|` is minimized by alternating 1D searches, starting from
/// the minimum found in the previous plane, so the march follows the valley
/// leaving `a`. The highest relaxed plane seeds a Brent maximization along
/// the segment direction. The transverse search is confined to a quarter of
/// the site separation on either side of the segment.
/// The pair is put in a canonical order first, so the result does not depend
/// on argument order.
pub fn barrier_between<M: FieldModel + ?Sized>(
    model: &M,
    site_a: &TrapSite,
    site_b: &TrapSite,
    tol: &TrapTolerances,
) -> Result<BarrierResult, TrapError> {
    let floor = site_a.b_min.max(site_b.b_min);
    let (p, q) = if lex_zyx(&site_a.position, &site_b.position).is_le() {
        (site_a.position, site_b.position)
    } else {
        (site_b.position, site_a.position)
    };
    let span = q - p;
    let length = span.norm();
    if length <= tol.merge_radius {
        return Ok(BarrierResult {
            delta_b: 0.0,
            saddle_position: p,
            saddle_b: floor,
            same_site: true,
        });
    }
    let dir = span / length;
    let field = |x: &Point| model.magnitude(x).map(|v| v.magnitude);
    let value = |x: &Point| field(x).unwrap_or(f64::INFINITY);

    let alpha = model.length_scale();
    let (e1, e2) = transverse_basis(&dir);
    let reach = 0.25 * length;
    let slice_step = length / (SEGMENT_SAMPLES - 1) as f64;

    // lowest |B| in the plane across the segment at `t`, searched locally from `start`
    let relaxed = |t: f64, start: (f64, f64), x_tol: f64| {
        let base = p + dir * t;
        let inside = |c: Vector2<f64>| c.x.abs() <= reach && c.y.abs() <= reach;
        let plane = |c: Vector2<f64>| {
            if inside(c) {
                value(&(base + e1 * c.x + e2 * c.y))
            } else {
                f64::INFINITY
            }
        };
        let mut c = Vector2::new(start.0, start.1);
        let mut v = plane(c);
        let along = |c: Vector2<f64>, u: Vector2<f64>| {
            local_minimize(
                |s| plane(c + u * s),
                0.0,
                slice_step,
                -2.0 * reach,
                2.0 * reach,
                x_tol,
            )
        };
        let axes = principal_axes(&plane, c, 1e-3 * alpha);
        for _ in 0..MAX_ROUNDS {
            let before = c;
            for u in axes {
                let (s, nv) = along(c, u);
                if nv <= v {
                    c += u * s;
                    v = nv;
                }
            }
            let net = c - before;
            if net.norm() < 10.0 * x_tol {
                break;
            }
            // Powell step along the sweep's net displacement
            let u = net.normalize();
            let (s, nv) = along(c, u);
            if nv <= v {
                c += u * s;
                v = nv;
            }
        }
        (v, (c.x, c.y))
    };

    // march across the slices, each starting from the previous slice's valley
    let coarse_tol = 1e-6 * alpha;
    let mut offset = (0.0, 0.0);
    let mut seed = (0, f64::NEG_INFINITY, offset);
    for i in 0..SEGMENT_SAMPLES {
        let (v, c) = relaxed(i as f64 * slice_step, offset, coarse_tol);
        offset = c;
        if v > seed.1 {
            seed = (i, v, c);
        }
    }

    let (i, _, start) = seed;
    let lo = i.saturating_sub(1) as f64 * slice_step;
    let hi = (i + 1).min(SEGMENT_SAMPLES - 1) as f64 * slice_step;
    let x_tol = 1e-9 * alpha;
    let (t, _) = brent_minimize(|t| -relaxed(t, start, x_tol).0, lo, hi, x_tol, 200);
    let (_, (c1, c2)) = relaxed(t, start, x_tol);
    let s = p + dir * t + e1 * c1 + e2 * c2;

    let saddle_b = field(&s)?;
    Ok(BarrierResult {
        delta_b: (saddle_b - floor).max(0.0),
        saddle_position: s,
        saddle_b,
        same_site: false,
    })
}
