//! Shared dense-matrix and integration kernels.
//!
//! Everything here is deterministic and dependency-free: a cyclic Jacobi
//! eigensolver for complex Hermitian matrices, a scaling-and-squaring matrix
//! exponential for the small generators used by the rotation operators, a
//! classical RK4 integrator for complex state vectors, and cubic Hermite
//! interpolation for sampled coefficient functions.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Max |A[i][j] - conj(A[j][i])| over all entries.
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[[i, j]].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations.
///
/// Returns eigenvalues in ascending order and the matching unitary
/// eigenvector matrix (columns). Iterates sweeps until the off-diagonal
/// Frobenius norm drops below 1e-14 of the total norm. Each eigenvector is
/// phase-fixed so that its largest-magnitude component is real positive,
/// which makes the output deterministic.
///
/// The input must be Hermitian within 1e-10 relative; the strict Hermitian
/// average (A + A†)/2 is what actually gets diagonalized.
pub fn eigh(a: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "matrix must be square, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let scale = frobenius(a);
    let defect = hermiticity_defect(a);
    if defect > 1e-10 * scale.max(1.0) {
        return Err(Error::NonHermitian {
            max_asymmetry: defect,
        });
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }

    // Hermitian average; also forces the diagonal real.
    let mut m = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = 0.5 * (a[[i, j]] + a[[j, i]].conj());
        }
        m[[i, i]] = C64::new(m[[i, i]].re, 0.0);
    }
    let mut v = Array2::<C64>::eye(n);

    if scale > 0.0 {
        let threshold = 1e-14 * scale;
        let max_sweeps = 100;
        let mut sweeps = 0;
        while off_diagonal_norm(&m) > threshold {
            if sweeps >= max_sweeps {
                return Err(Error::EigenConvergence {
                    sweeps,
                    off: off_diagonal_norm(&m),
                });
            }
            sweeps += 1;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = m[[p, q]];
                    let mag = apq.norm();
                    if mag <= 1e-300 {
                        continue;
                    }
                    // Unitary 2x2 rotation U = [[c, -s e^{iα}], [s e^{-iα}, c]]
                    // with α = arg(A_pq), zeroing the (p,q) entry of U† A U.
                    let phase = apq / mag;
                    let app = m[[p, p]].re;
                    let aqq = m[[q, q]].re;
                    let theta = (aqq - app) / (2.0 * mag);
                    let t = if theta == 0.0 {
                        1.0
                    } else {
                        let r = (theta * theta + 1.0).sqrt();
                        -theta.signum() / (theta.abs() + r)
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let sp = s * phase; // s e^{iα}
                    let spc = sp.conj();

                    // Column update: M ← M U, V ← V U.
                    for k in 0..n {
                        let mkp = m[[k, p]];
                        let mkq = m[[k, q]];
                        m[[k, p]] = c * mkp + spc * mkq;
                        m[[k, q]] = -sp * mkp + c * mkq;
                        let vkp = v[[k, p]];
                        let vkq = v[[k, q]];
                        v[[k, p]] = c * vkp + spc * vkq;
                        v[[k, q]] = -sp * vkp + c * vkq;
                    }
                    // Row update: M ← U† M.
                    for k in 0..n {
                        let mpk = m[[p, k]];
                        let mqk = m[[q, k]];
                        m[[p, k]] = c * mpk + sp * mqk;
                        m[[q, k]] = -spc * mpk + c * mqk;
                    }
                    m[[p, q]] = C64::new(0.0, 0.0);
                    m[[q, p]] = C64::new(0.0, 0.0);
                    m[[p, p]] = C64::new(m[[p, p]].re, 0.0);
                    m[[q, q]] = C64::new(m[[q, q]].re, 0.0);
                }
            }
        }
    }

    // Sort ascending; stable in the original index for exact ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].re.partial_cmp(&m[[j, j]].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]].re).collect();
    let mut vectors = Array2::<C64>::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        // Phase fix: largest-|component| real positive.
        let mut imax = 0;
        let mut best = 0.0;
        for k in 0..n {
            let mag = v[[k, src]].norm();
            if mag > best {
                best = mag;
                imax = k;
            }
        }
        let fix = if best > 0.0 {
            v[[imax, src]].conj() / best
        } else {
            C64::new(1.0, 0.0)
        };
        for k in 0..n {
            vectors[[k, col]] = v[[k, src]] * fix;
        }
    }
    Ok((values, vectors))
}

/// Dense matrix exponential by scaling-and-squaring with a truncated Taylor
/// series (terms dropped below 1e-16 relative). Intended for the small
/// generators used here (dimension ≤ 5).
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = frobenius(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a.mapv(|z| z / 2f64.powi(squarings as i32));

    let mut result = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..200 {
        term = term.dot(&b).mapv(|z| z / k as f64);
        result += &term;
        if frobenius(&term) <= 1e-16 * frobenius(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// One classical RK4 step for dy/dt = f(t, y) on a complex state vector.
pub fn rk4_step<F>(f: &F, t: f64, y: &Array1<C64>, h: f64) -> Array1<C64>
where
    F: Fn(f64, &Array1<C64>) -> Array1<C64>,
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + &k1.mapv(|z| z * 0.5 * h)));
    let k3 = f(t + 0.5 * h, &(y + &k2.mapv(|z| z * 0.5 * h)));
    let k4 = f(t + h, &(y + &k3.mapv(|z| z * h)));
    y + &((k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (h / 6.0)))
}

/// Cumulative trapezoidal integral of samples `f` over grid `t`.
/// Output has the same length; the first entry is 0.
pub fn cumulative_trapezoid(t: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), f.len());
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
        out.push(acc);
    }
    out
}

/// Derivative samples of `y` on the (possibly nonuniform) grid `t` using
/// three-point stencils: centered in the interior, one-sided second-order at
/// the two ends.
pub fn derivative_samples(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    assert_eq!(n, y.len());
    assert!(n >= 3, "derivative_samples needs at least 3 samples");
    let mut out = vec![0.0; n];
    for i in 0..n {
        let (i0, i1, i2) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        out[i] = three_point_derivative(
            t[i],
            (t[i0], y[i0]),
            (t[i1], y[i1]),
            (t[i2], y[i2]),
        );
    }
    out
}

/// Derivative of the quadratic through three points, evaluated at `x`.
fn three_point_derivative(x: f64, p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    y0 * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1))
}

/// Continuity handling for sampled angles: entries of `raw` that are `None`
/// (angle undefined, e.g. azimuth at a pole or zero coupling) inherit the
/// nearest preceding defined value (or the first following one); the result
/// is then unwrapped so no adjacent jump exceeds π.
pub(crate) fn fill_gaps_and_unwrap(raw: Vec<Option<f64>>) -> Vec<f64> {
    let n = raw.len();
    let mut out = vec![0.0; n];
    let mut last: Option<f64> = None;
    for i in 0..n {
        if let Some(p) = raw[i] {
            out[i] = p;
            last = Some(p);
        } else if let Some(p) = last {
            out[i] = p;
        } else if let Some(p) = raw[i..].iter().flatten().next() {
            out[i] = *p;
        }
    }
    let tau = 2.0 * std::f64::consts::PI;
    let mut offset = 0.0;
    let mut prev = out[0];
    for p in out.iter_mut() {
        let mut candidate = *p + offset;
        let k = ((prev - candidate) / tau).round();
        candidate += k * tau;
        offset += k * tau;
        prev = candidate;
        *p = candidate;
    }
    out
}

/// Piecewise cubic Hermite interpolant with finite-difference slopes.
///
/// Clamps evaluation outside the grid to the end values; the callers only
/// evaluate inside (RK4 midpoints between samples).
#[derive(Debug, Clone)]
pub struct CubicHermite {
    t: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl CubicHermite {
    pub fn new(t: &[f64], y: &[f64]) -> Self {
        let d = derivative_samples(t, y);
        Self {
            t: t.to_vec(),
            y: y.to_vec(),
            d,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x <= self.t[0] {
            return self.y[0];
        }
        if x >= self.t[n - 1] {
            return self.y[n - 1];
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.t[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.t[hi] - self.t[lo];
        let s = (x - self.t[lo]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[lo] + h10 * h * self.d[lo] + h01 * self.y[hi] + h11 * h * self.d[hi]
    }
}
