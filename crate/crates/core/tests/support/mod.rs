//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls into the library's numerical internals; each routine is
//! a separate, deliberately plain implementation.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

pub const UM: f64 = 1e-6;
const MU0: f64 = 4.0 * PI * 1e-7;

/// Closed-form lattice magnitude typed out term by term.
pub fn lattice_magnitude(
    alpha: f64,
    tau: f64,
    m_z: f64,
    bias: [f64; 3],
    p: [f64; 3],
    printed: bool,
) -> f64 {
    let b0 = MU0 * m_z / PI;
    let beta = PI / alpha;
    let [bx, by, bz] = bias;
    let [x, y, z] = p;
    let e = (-beta * (z - tau).abs()).exp();
    let c = 1.0 - (-beta * tau).exp();
    let k = if printed { b0 * b0 } else { b0 };
    let first = bx * bx + by * by + bz * bz;
    let second = 2.0 * b0 * b0 * c * c * e * e * (beta * x).cos() * (beta * y).cos();
    let third = 2.0 * k * c * e * ((bx + bz) * (beta * x).cos() + (by + bz) * (beta * y).cos());
    (first + second + third).max(0.0).sqrt()
}

/// Point-dipole field of moment `m` at offset `r`.
pub fn dipole_field(m: Vector3<f64>, r: Vector3<f64>) -> Vector3<f64> {
    let d = r.norm();
    let n = r / d;
    MU0 / (4.0 * PI) * (3.0 * n * n.dot(&m) - m) / d.powi(3)
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

struct Panel {
    origin: Vector3<f64>,
    u: Vector3<f64>,
    v: Vector3<f64>,
}

fn panel_integral(p: &Vector3<f64>, panel: &Panel, gl: &(Vec<f64>, Vec<f64>)) -> Vector3<f64> {
    let (xs, ws) = gl;
    let mut acc = Vector3::zeros();
    for (xi, wi) in xs.iter().zip(ws) {
        for (xj, wj) in xs.iter().zip(ws) {
            let q = panel.origin + panel.u * (0.5 * (xi + 1.0)) + panel.v * (0.5 * (xj + 1.0));
            let r = p - q;
            acc += r * (wi * wj / r.norm().powi(3));
        }
    }
    acc * (0.25 * panel.u.norm() * panel.v.norm())
}

fn adaptive(
    p: &Vector3<f64>,
    panel: Panel,
    coarse: Vector3<f64>,
    atol: f64,
    depth: usize,
    gl: &(Vec<f64>, Vec<f64>),
) -> Vector3<f64> {
    let hu = panel.u * 0.5;
    let hv = panel.v * 0.5;
    let kids = [
        Panel {
            origin: panel.origin,
            u: hu,
            v: hv,
        },
        Panel {
            origin: panel.origin + hu,
            u: hu,
            v: hv,
        },
        Panel {
            origin: panel.origin + hv,
            u: hu,
            v: hv,
        },
        Panel {
            origin: panel.origin + hu + hv,
            u: hu,
            v: hv,
        },
    ];
    let parts: Vec<Vector3<f64>> = kids.iter().map(|k| panel_integral(p, k, gl)).collect();
    let fine: Vector3<f64> = parts.iter().sum();
    if (fine - coarse).norm() < atol || depth == 0 {
        return fine;
    }
    kids.into_iter()
        .zip(parts)
        .map(|(k, c)| adaptive(p, k, c, 0.25 * atol, depth - 1, gl))
        .sum()
}

/// Field of a uniformly magnetized box from its surface charges, integrated
/// numerically face by face.
pub fn box_field_quadrature(
    center: Vector3<f64>,
    half: Vector3<f64>,
    magnetization: Vector3<f64>,
    p: Vector3<f64>,
    rel_tol: f64,
) -> Vector3<f64> {
    let gl = gauss_legendre(12);
    let mut total = Vector3::zeros();
    for axis in 0..3 {
        let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
        for sign in [-1.0, 1.0] {
            let sigma = sign * magnetization[axis];
            if sigma == 0.0 {
                continue;
            }
            let mut origin = center;
            origin[axis] += sign * half[axis];
            origin[a] -= half[a];
            origin[b] -= half[b];
            let mut u = Vector3::zeros();
            u[a] = 2.0 * half[a];
            let mut v = Vector3::zeros();
            v[b] = 2.0 * half[b];
            let panel = Panel { origin, u, v };
            let coarse = panel_integral(&p, &panel, &gl);
            let atol = rel_tol * coarse.norm().max(1e-300);
            total += adaptive(&p, panel, coarse, atol, 14, &gl) * sigma;
        }
    }
    total * (MU0 / (4.0 * PI))
}

/// Central-difference Jacobian `J[i][j] = ∂B_i/∂x_j`.
pub fn jacobian(f: impl Fn(Vector3<f64>) -> Vector3<f64>, p: Vector3<f64>, h: f64) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    for c in 0..3 {
        let mut e = Vector3::zeros();
        e[c] = h;
        let d = (f(p + e) - f(p - e)) / (2.0 * h);
        j.set_column(c, &d);
    }
    j
}

/// Minima of `f` on a dense grid, each zoomed in by repeated local resampling.
pub fn dense_grid_minima(
    f: impl Fn(Vector3<f64>) -> f64,
    lo: Vector3<f64>,
    hi: Vector3<f64>,
    n: usize,
    final_step: f64,
) -> Vec<(Vector3<f64>, f64)> {
    let step = (hi - lo) / (n - 1) as f64;
    let at = |i: usize, j: usize, k: usize| {
        lo + Vector3::new(i as f64 * step.x, j as f64 * step.y, k as f64 * step.z)
    };
    let mut vals = vec![0.0; n * n * n];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                vals[i + n * (j + n * k)] = f(at(i, j, k));
            }
        }
    }
    let mut out = Vec::new();
    for k in 1..n - 1 {
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let v = vals[i + n * (j + n * k)];
                let mut lowest = true;
                for dk in 0..3 {
                    for dj in 0..3 {
                        for di in 0..3 {
                            if (di, dj, dk) == (1, 1, 1) {
                                continue;
                            }
                            let w = vals[(i + di - 1) + n * ((j + dj - 1) + n * (k + dk - 1))];
                            if w <= v {
                                lowest = false;
                            }
                        }
                    }
                }
                if lowest {
                    out.push(zoom(&f, at(i, j, k), step, final_step));
                }
            }
        }
    }
    out
}

fn zoom(
    f: &impl Fn(Vector3<f64>) -> f64,
    start: Vector3<f64>,
    step: Vector3<f64>,
    final_step: f64,
) -> (Vector3<f64>, f64) {
    let mut best = start;
    let mut best_v = f(start);
    let mut h = step;
    while h.max() > final_step {
        let mut moved = true;
        while moved {
            moved = false;
            let centre = best;
            for a in -5i32..=5 {
                for b in -5i32..=5 {
                    for c in -5i32..=5 {
                        let q = centre
                            + Vector3::new(a as f64 * h.x, b as f64 * h.y, c as f64 * h.z) / 5.0;
                        let v = f(q);
                        if v < best_v {
                            best_v = v;
                            best = q;
                            moved = true;
                        }
                    }
                }
            }
        }
        h /= 5.0;
    }
    (best, best_v)
}

/// Cluster labels by single linkage on scalar heights (all pairs, union-find).
pub fn single_linkage(z: &[f64], tol: f64) -> Vec<usize> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).abs() <= tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|i| root(&mut parent, i)).collect()
}

/// Two label vectors describe the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// Highest point of the transversely relaxed profile along the segment `a → b`.
pub fn line_scan_barrier(
    f: impl Fn(Vector3<f64>) -> f64,
    a: Vector3<f64>,
    b: Vector3<f64>,
    samples: usize,
    reach: f64,
    final_step: f64,
) -> (f64, Vector3<f64>) {
    let dir = (b - a).normalize();
    let helper = if dir.z.abs() < 0.9 {
        Vector3::z()
    } else {
        Vector3::x()
    };
    let e1 = dir.cross(&helper).normalize();
    let e2 = dir.cross(&e1).normalize();
    let mut offset = (0.0, 0.0);
    let mut top = (f64::NEG_INFINITY, a);
    for i in 0..samples {
        let base = a + (b - a) * (i as f64 / (samples - 1) as f64);
        let g = |c: (f64, f64)| f(base + e1 * c.0 + e2 * c.1);
        // compass search in the transverse plane, warm-started from the previous slice
        let mut c = offset;
        let mut v = g(c);
        let mut h = 4.0 * (b - a).norm() / (samples - 1) as f64;
        while h > final_step {
            let mut improved = false;
            for d in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
                let t = (c.0 + d.0, c.1 + d.1);
                if t.0.hypot(t.1) > reach {
                    continue;
                }
                let w = g(t);
                if w < v {
                    v = w;
                    c = t;
                    improved = true;
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        offset = c;
        if v > top.0 {
            top = (v, base + e1 * c.0 + e2 * c.1);
        }
    }
    top
}

/// Transmission through a rectangular barrier of height `u0` and width `w` at energy `e`.
pub fn square_barrier_transmission(mass: f64, u0: f64, w: f64, e: f64) -> f64 {
    let hbar = 1.054571817e-34;
    (-2.0 * w * (2.0 * mass * (u0 - e)).sqrt() / hbar).exp()
}

/// Second derivative along `dir` by Richardson-extrapolated central differences.
pub fn curvature_along(
    f: impl Fn(Vector3<f64>) -> f64,
    p: Vector3<f64>,
    dir: Vector3<f64>,
    h: f64,
) -> f64 {
    let d2 = |h: f64| (f(p + dir * h) - 2.0 * f(p) + f(p - dir * h)) / (h * h);
    (4.0 * d2(0.5 * h) - d2(h)) / 3.0
}
