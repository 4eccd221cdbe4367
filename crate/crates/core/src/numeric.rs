//! Small numerical kernels shared by the field models and the trap search:
//! compensated summation, central finite differences, 1D bounded
//! minimization and a sorted 3×3 symmetric eigensolver.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::Point;

/// Neumaier (improved Kahan–Babuška) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Component-wise compensated sum of 3-vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedVec3 {
    parts: [CompensatedSum; 3],
}

impl CompensatedVec3 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: &Vector3<f64>) {
        for (part, x) in self.parts.iter_mut().zip(v.iter()) {
            part.add(*x);
        }
    }

    pub fn value(&self) -> Vector3<f64> {
        Vector3::new(
            self.parts[0].value(),
            self.parts[1].value(),
            self.parts[2].value(),
        )
    }
}

/// `cos(π t)` with exact zeros at half-integers and exact ±1 at integers.
pub fn cos_pi(t: f64) -> f64 {
    let r = (t - 2.0 * (t * 0.5).round()).abs();
    if r <= 0.25 {
        (std::f64::consts::PI * r).cos()
    } else if r <= 0.75 {
        (std::f64::consts::PI * (0.5 - r)).sin()
    } else {
        -(std::f64::consts::PI * (1.0 - r)).cos()
    }
}

fn unit(axis: usize) -> Vector3<f64> {
    let mut e = Vector3::zeros();
    e[axis] = 1.0;
    e
}

/// Central-difference gradient of a scalar function with step `h`.
pub fn central_gradient<E>(
    f: impl Fn(&Point) -> Result<f64, E>,
    p: &Point,
    h: f64,
) -> Result<Vector3<f64>, E> {
    let mut g = Vector3::zeros();
    for axis in 0..3 {
        let e = unit(axis) * h;
        g[axis] = (f(&(p + e))? - f(&(p - e))?) / (2.0 * h);
    }
    Ok(g)
}

/// Second-order central-difference Hessian with step `h`. Symmetric by construction.
pub fn central_hessian<E>(
    f: impl Fn(&Point) -> Result<f64, E>,
    p: &Point,
    h: f64,
) -> Result<Matrix3<f64>, E> {
    let f0 = f(p)?;
    let mut hess = Matrix3::zeros();
    for i in 0..3 {
        let ei = unit(i) * h;
        hess[(i, i)] = (f(&(p + ei))? - 2.0 * f0 + f(&(p - ei))?) / (h * h);
        for j in (i + 1)..3 {
            let ej = unit(j) * h;
            let v = (f(&(p + ei + ej))? - f(&(p + ei - ej))? - f(&(p - ei + ej))?
                + f(&(p - ei - ej))?)
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// [`central_hessian`] at `h` and `h/2` combined to cancel the `h²` error.
pub fn richardson_hessian<E>(
    f: impl Fn(&Point) -> Result<f64, E>,
    p: &Point,
    h: f64,
) -> Result<Matrix3<f64>, E> {
    let coarse = central_hessian(&f, p, h)?;
    let fine = central_hessian(&f, p, 0.5 * h)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Eigen-decomposition of a symmetric 3×3 matrix, eigenvalues ascending.
/// Column `k` of the returned matrix is the unit eigenvector for value `k`.
pub fn sorted_symmetric_eigen(m: &Matrix3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vector3::zeros();
    let mut vectors = Matrix3::zeros();
    for (k, &src) in order.iter().enumerate() {
        values[k] = eig.eigenvalues[src];
        let mut v = eig.eigenvectors.column(src).into_owned();
        // fix the sign so output does not depend on solver internals
        let lead =
            v.iter().copied().fold(
                0.0_f64,
                |acc, x| {
                    if x.abs() > acc.abs() + 1e-12 {
                        x
                    } else {
                        acc
                    }
                },
            );
        if lead < 0.0 {
            v = -v;
        }
        vectors.set_column(k, &v);
    }
    (values, vectors)
}

/// Brent's bounded minimization of `f` on `[lo, hi]`.
///
/// Returns `(x, f(x))` for the best point found. Non-finite function values
/// are treated as `+∞` so callers can map domain errors to infinity.
pub fn brent_minimize(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    x_tol: f64,
    max_iters: usize,
) -> (f64, f64) {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = eval(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..max_iters {
        let mid = 0.5 * (a + b);
        let tol1 = x_tol + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 && fx.is_finite() && fw.is_finite() && fv.is_finite() {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x >= mid { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = eval(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Local minimization of `f` starting at `x0`: walk downhill with growing
/// steps until the function rises, then polish the bracket with Brent.
/// The search never leaves `[lo, hi]`.
pub fn local_minimize(
    f: impl Fn(f64) -> f64,
    x0: f64,
    step: f64,
    lo: f64,
    hi: f64,
    x_tol: f64,
) -> (f64, f64) {
    const GROW: f64 = 1.618_033_988_749_895;
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let x0 = x0.clamp(lo, hi);
    let f0 = eval(x0);
    let right = (x0 + step).min(hi);
    let left = (x0 - step).max(lo);
    let (fr, fl) = (eval(right), eval(left));
    let dir = if fr < f0 && fr <= fl {
        1.0
    } else if fl < f0 {
        -1.0
    } else {
        return brent_minimize(&f, left, right, x_tol, 200);
    };
    let mut prev = x0;
    let mut cur = if dir > 0.0 { right } else { left };
    let mut f_cur = if dir > 0.0 { fr } else { fl };
    let mut h = step;
    loop {
        h *= GROW;
        let next = (cur + dir * h).clamp(lo, hi);
        if next == cur {
            return brent_minimize(&f, prev, cur, x_tol, 200);
        }
        let f_next = eval(next);
        if f_next >= f_cur {
            return brent_minimize(&f, prev, next, x_tol, 200);
        }
        prev = cur;
        cur = next;
        f_cur = f_next;
    }
}
