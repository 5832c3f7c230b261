//! Kinematics and exact quantum evolution of a matter wave whose propagation
//! direction follows a noncoplanar curved guide.
//!
//! A guided wave with constant wave-vector modulus k and time-dependent
//! direction n(t) = (sinθ cosφ, sinθ sinφ, cosθ) precesses its internal
//! angular momentum in the effective field −(k × k̇)/k². The evolution under
//! H_eff(t) = [k × k̇ / k²]·J has the closed form
//! |m, k(t)⟩ = exp(−i φ_m(t)) V(t) |m⟩ with the accumulated phase
//! φ_m(t) = m ∫ φ̇ (1 − cosθ) dt′ and the rotation V(t) = exp(βJ₊ − β*J₋),
//! β = −(θ/2) e^{−iφ}. The closed form holds exactly (no adiabatic
//! assumption); [`evolve_direct`] provides the independent integration oracle.
//!
//! Angular frequencies are rad/s; Hamiltonians are returned in units of ħ
//! (i.e. divided by ħ), phases in rad.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::constants::HBAR;
use crate::linalg::{self, CubicHermite};
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Pole detection threshold on sin θ for the azimuth convention.
const POLE_EPS: f64 = 1e-12;

/// Time-sampled unit propagation direction (θ, φ) with constant modulus k.
#[derive(Debug, Clone)]
pub struct WaveVectorPath {
    times: Vec<f64>,
    theta: Vec<f64>,
    phi: Vec<f64>,
    k_modulus: f64,
}

impl WaveVectorPath {
    /// Build a path from explicit angle samples, validating the invariants:
    /// strictly increasing times (≥ 3 samples), θ ∈ [0, π], unwrapped φ
    /// (no adjacent jump above π), k > 0.
    pub fn new(times: Vec<f64>, theta: Vec<f64>, phi: Vec<f64>, k_modulus: f64) -> Result<Self> {
        if times.len() < 3 {
            return Err(Error::InsufficientData {
                needed: 3,
                got: times.len(),
            });
        }
        if theta.len() != times.len() {
            return Err(Error::GridMismatch {
                left: times.len(),
                right: theta.len(),
            });
        }
        if phi.len() != times.len() {
            return Err(Error::GridMismatch {
                left: times.len(),
                right: phi.len(),
            });
        }
        if !k_modulus.is_finite() {
            return Err(Error::NonFinite {
                name: "k_modulus",
                value: k_modulus,
            });
        }
        if k_modulus <= 0.0 {
            return Err(Error::NonPositive {
                name: "k_modulus",
                value: k_modulus,
            });
        }
        for i in 1..times.len() {
            if times[i] <= times[i - 1] {
                return Err(Error::NonMonotonicGrid { index: i });
            }
            let jump = (phi[i] - phi[i - 1]).abs();
            if jump > std::f64::consts::PI + 1e-9 {
                return Err(Error::PhaseWrap { index: i, jump });
            }
        }
        for (i, &th) in theta.iter().enumerate() {
            if !(0.0..=std::f64::consts::PI).contains(&th) {
                return Err(Error::PolarAngleRange {
                    index: i,
                    value: th,
                });
            }
        }
        Ok(Self {
            times,
            theta,
            phi,
            k_modulus,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn k_modulus(&self) -> f64 {
        self.k_modulus
    }

    /// Unit direction at sample `i`.
    pub fn direction(&self, i: usize) -> Vec3 {
        let (st, ct) = (self.theta[i].sin(), self.theta[i].cos());
        let (sp, cp) = (self.phi[i].sin(), self.phi[i].cos());
        [st * cp, st * sp, ct]
    }

    /// Wave vectors k·n(t) at every sample.
    pub fn wave_vectors(&self) -> Vec<Vec3> {
        (0..self.len())
            .map(|i| scale(self.direction(i), self.k_modulus))
            .collect()
    }

    /// Rotate the whole direction path by the fixed rotation that maps the
    /// initial direction onto +z, so the closed-form evolution (which wants
    /// θ(0) = 0) applies. The rotation is rigid, so mutual angles between
    /// samples — and hence the effective-field magnitude — are unchanged.
    pub fn rotated_to_initial_z(&self) -> Result<Self> {
        let n0 = self.direction(0);
        let zhat = [0.0, 0.0, 1.0];
        let axis_raw = cross(n0, zhat);
        let sin_a = norm(axis_raw);
        let cos_a = dot(n0, zhat);
        let dirs: Vec<Vec3> = if sin_a < 1e-15 {
            if cos_a > 0.0 {
                (0..self.len()).map(|i| self.direction(i)).collect()
            } else {
                // Antiparallel start: rotate by π about x.
                (0..self.len())
                    .map(|i| {
                        let n = self.direction(i);
                        [n[0], -n[1], -n[2]]
                    })
                    .collect()
            }
        } else {
            let axis = scale(axis_raw, 1.0 / sin_a);
            (0..self.len())
                .map(|i| {
                    let v = self.direction(i);
                    // Rodrigues rotation.
                    add(
                        add(scale(v, cos_a), scale(cross(axis, v), sin_a)),
                        scale(axis, dot(axis, v) * (1.0 - cos_a)),
                    )
                })
                .collect()
        };
        let (theta, phi) = angles_from_directions(&dirs);
        Self::new(self.times.clone(), theta, phi, self.k_modulus)
    }
}

/// Extract (θ, φ) samples from unit directions with the azimuth conventions:
/// φ from atan2, pole samples (sinθ below threshold) inherit the azimuth of
/// the nearest preceding non-pole sample (or the first following one), and
/// the result is unwrapped for continuity.
fn angles_from_directions(dirs: &[Vec3]) -> (Vec<f64>, Vec<f64>) {
    let n = dirs.len();
    let mut theta = Vec::with_capacity(n);
    let mut phi_raw: Vec<Option<f64>> = Vec::with_capacity(n);
    for d in dirs {
        let rho = d[0].hypot(d[1]);
        theta.push(rho.atan2(d[2]));
        if rho < POLE_EPS * norm(*d).max(1e-300) {
            phi_raw.push(None);
        } else {
            phi_raw.push(Some(d[1].atan2(d[0])));
        }
    }
    (theta, linalg::fill_gaps_and_unwrap(phi_raw))
}

/// Build a path from centerline position samples traversed at constant
/// speed: tangents by centered finite differences (one-sided second-order at
/// the ends), times from cumulative chord length / speed, and
/// k = mass·speed/ħ.
pub fn path_from_centerline(points: &[Vec3], speed: f64, mass: f64) -> Result<WaveVectorPath> {
    if points.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: points.len(),
        });
    }
    if speed <= 0.0 {
        return Err(Error::NonPositive {
            name: "speed",
            value: speed,
        });
    }
    let n = points.len();
    let mut times = Vec::with_capacity(n);
    times.push(0.0);
    for i in 1..n {
        let seg = norm([
            points[i][0] - points[i - 1][0],
            points[i][1] - points[i - 1][1],
            points[i][2] - points[i - 1][2],
        ]);
        if seg == 0.0 {
            return Err(Error::DegenerateTangent { index: i - 1 });
        }
        times.push(times[i - 1] + seg / speed);
    }
    path_from_timed_points(&times, points, mass, Some(speed))
}

/// Build a path from (t, position) samples: tangents by finite differences
/// of position with respect to the given times. When `speed` is `None`,
/// k uses the mean tangent speed (the modulus is assumed constant).
pub fn path_from_timed_points(
    times: &[f64],
    points: &[Vec3],
    mass: f64,
    speed: Option<f64>,
) -> Result<WaveVectorPath> {
    if points.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: points.len(),
        });
    }
    if points.len() != times.len() {
        return Err(Error::GridMismatch {
            left: times.len(),
            right: points.len(),
        });
    }
    if mass <= 0.0 {
        return Err(Error::NonPositive {
            name: "mass",
            value: mass,
        });
    }
    let n = points.len();
    for i in 1..n {
        if times[i] <= times[i - 1] {
            return Err(Error::NonMonotonicGrid { index: i });
        }
        let seg = norm([
            points[i][0] - points[i - 1][0],
            points[i][1] - points[i - 1][1],
            points[i][2] - points[i - 1][2],
        ]);
        if seg == 0.0 {
            return Err(Error::DegenerateTangent { index: i - 1 });
        }
    }
    let mut comps: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (axis, comp) in comps.iter_mut().enumerate() {
        let ys: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        *comp = linalg::derivative_samples(times, &ys);
    }
    let mut dirs = Vec::with_capacity(n);
    let mut mean_speed = 0.0;
    for i in 0..n {
        let v = [comps[0][i], comps[1][i], comps[2][i]];
        let s = norm(v);
        if s == 0.0 {
            return Err(Error::DegenerateTangent { index: i });
        }
        mean_speed += s;
        dirs.push(scale(v, 1.0 / s));
    }
    mean_speed /= n as f64;
    let v_for_k = speed.unwrap_or(mean_speed);
    let (theta, phi) = angles_from_directions(&dirs);
    WaveVectorPath::new(times.to_vec(), theta, phi, mass * v_for_k / HBAR)
}

/// Effective precession field −(k × k̇)/k² per sample (rad/s), with k̇ from
/// finite differences of the sampled wave vectors.
pub fn effective_field(path: &WaveVectorPath) -> Vec<Vec3> {
    let ks = path.wave_vectors();
    let kdots = wave_vector_derivatives(path, &ks);
    let k2 = path.k_modulus() * path.k_modulus();
    ks.iter()
        .zip(&kdots)
        .map(|(&k, &kd)| scale(cross(k, kd), -1.0 / k2))
        .collect()
}

fn wave_vector_derivatives(path: &WaveVectorPath, ks: &[Vec3]) -> Vec<Vec3> {
    let t = path.times();
    let mut out = vec![[0.0; 3]; ks.len()];
    for axis in 0..3 {
        let ys: Vec<f64> = ks.iter().map(|k| k[axis]).collect();
        let d = linalg::derivative_samples(t, &ys);
        for (o, di) in out.iter_mut().zip(d) {
            o[axis] = di;
        }
    }
    out
}

/// Max over samples of ‖k̇ + k×(k×k̇)/k²‖ / ‖k̇‖ — the constant-modulus
/// motion identity. Zero for a straight path; for sampled smooth paths the
/// value is pure finite-difference error and shrinks as O(h²).
pub fn motion_identity_residual(path: &WaveVectorPath) -> f64 {
    let ks = path.wave_vectors();
    let kdots = wave_vector_derivatives(path, &ks);
    let k2 = path.k_modulus() * path.k_modulus();
    let mut worst = 0.0f64;
    for (&k, &kd) in ks.iter().zip(&kdots) {
        let denom = norm(kd);
        if denom == 0.0 {
            continue;
        }
        let res = add(kd, scale(cross(k, cross(k, kd)), 1.0 / k2));
        worst = worst.max(norm(res) / denom);
    }
    worst
}

/// Angular momentum matrices for a spin j = twice_j/2 in the basis ordered by
/// descending magnetic quantum number (|m = +j⟩ first). J₃ carries the m
/// values; J₊ and J₋ are the dimensionless ladder operators.
#[derive(Debug, Clone)]
pub struct AngularMomentumRep {
    twice_j: u32,
    j3: Array2<C64>,
    jplus: Array2<C64>,
    jminus: Array2<C64>,
}

impl AngularMomentumRep {
    pub fn new(twice_j: u32) -> Self {
        let dim = twice_j as usize + 1;
        let j = twice_j as f64 / 2.0;
        let mut j3 = Array2::<C64>::zeros((dim, dim));
        let mut jplus = Array2::<C64>::zeros((dim, dim));
        for i in 0..dim {
            let m = j - i as f64;
            j3[[i, i]] = C64::new(m, 0.0);
            if i > 0 {
                // ⟨m+1|J₊|m⟩ for the state in column i (m = j − i).
                let amp = ((j - m) * (j + m + 1.0)).sqrt();
                jplus[[i - 1, i]] = C64::new(amp, 0.0);
            }
        }
        let jminus = jplus.t().mapv(|z| z.conj());
        Self {
            twice_j,
            j3,
            jplus,
            jminus,
        }
    }

    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn j3(&self) -> &Array2<C64> {
        &self.j3
    }

    pub fn jplus(&self) -> &Array2<C64> {
        &self.jplus
    }

    pub fn jminus(&self) -> &Array2<C64> {
        &self.jminus
    }

    /// v·J for a real 3-vector v, using J₁ = (J₊+J₋)/2, J₂ = (J₊−J₋)/2i.
    pub fn dot_j(&self, v: Vec3) -> Array2<C64> {
        let cp = C64::new(0.5 * v[0], -0.5 * v[1]); // coefficient of J₊
        let cm = C64::new(0.5 * v[0], 0.5 * v[1]); // coefficient of J₋
        self.j3.mapv(|z| z * v[2]) + self.jplus.mapv(|z| z * cp) + self.jminus.mapv(|z| z * cm)
    }

    /// Basis vector |m⟩ for twice_m ∈ {−twice_j, −twice_j+2, …, twice_j}.
    pub fn basis_state(&self, twice_m: i32) -> Result<Array1<C64>> {
        let idx = self.basis_index(twice_m)?;
        let mut v = Array1::<C64>::zeros(self.dim());
        v[idx] = C64::new(1.0, 0.0);
        Ok(v)
    }

    fn basis_index(&self, twice_m: i32) -> Result<usize> {
        let tj = self.twice_j as i32;
        if twice_m.abs() > tj || (tj - twice_m) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "invalid magnetic number 2m = {twice_m} for 2j = {tj}"
            )));
        }
        Ok(((tj - twice_m) / 2) as usize)
    }
}

/// Effective Hamiltonian [k×k̇/k²]·J at one sample, in units of ħ (rad/s).
/// Hermitian and traceless.
pub fn effective_hamiltonian(
    path: &WaveVectorPath,
    rep: &AngularMomentumRep,
    sample_index: usize,
) -> Array2<C64> {
    let b = effective_field(path);
    // H = (k×k̇/k²)·J = −B_eff·J
    rep.dot_j(scale(b[sample_index], -1.0))
}

/// Cumulative phase m ∫ φ̇ (1 − cosθ) dt′ per sample (rad), by trapezoidal
/// quadrature with finite-difference φ̇. For a closed direction loop the
/// final value is m times the enclosed solid angle.
pub fn geometric_phase(path: &WaveVectorPath, twice_m: i32) -> Vec<f64> {
    let m = twice_m as f64 / 2.0;
    let phi_dot = linalg::derivative_samples(path.times(), path.phi());
    let integrand: Vec<f64> = phi_dot
        .iter()
        .zip(path.theta())
        .map(|(&pd, &th)| m * pd * (1.0 - th.cos()))
        .collect();
    linalg::cumulative_trapezoid(path.times(), &integrand)
}

/// Direction-following rotation V = exp(βJ₊ − β*J₋) with β = −(θ/2)e^{−iφ};
/// maps the +z quantization axis onto (θ, φ). Unitary by construction.
pub fn rotation_operator(theta: f64, phi: f64, rep: &AngularMomentumRep) -> Array2<C64> {
    let beta = C64::from_polar(theta / 2.0, -phi) * C64::new(-1.0, 0.0);
    let gen = rep.jplus().mapv(|z| z * beta) - rep.jminus().mapv(|z| z * beta.conj());
    linalg::expm(&gen)
}

/// Per-sample output of the guide evolution: the evolved state, and for the
/// closed-form route also the accumulated phase and the rotation operator.
#[derive(Debug, Clone)]
pub struct GuideEvolution {
    pub times: Vec<f64>,
    pub states: Vec<Array1<C64>>,
    pub phases: Option<Vec<f64>>,
    pub operators: Option<Vec<Array2<C64>>>,
}

impl GuideEvolution {
    /// Max deviation of any state norm from 1.
    pub fn norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form evolution |m, k(t)⟩ = e^{−iφ_m(t)} V(t) |m⟩.
///
/// Requires θ(0) = 0 (initial direction along +z); rotate the frame with
/// [`WaveVectorPath::rotated_to_initial_z`] first otherwise. Along the
/// output, ⟨n(t)·J⟩ = m at every sample.
pub fn evolve_closed_form(
    path: &WaveVectorPath,
    rep: &AngularMomentumRep,
    twice_m: i32,
) -> Result<GuideEvolution> {
    let theta0 = path.theta()[0];
    if theta0.abs() > 1e-9 {
        return Err(Error::InitialCondition { theta0 });
    }
    let initial = rep.basis_state(twice_m)?;
    let phases = geometric_phase(path, twice_m);
    let mut operators = Vec::with_capacity(path.len());
    let mut states = Vec::with_capacity(path.len());
    for i in 0..path.len() {
        let v = rotation_operator(path.theta()[i], path.phi()[i], rep);
        let state = v
            .dot(&initial)
            .mapv(|z| z * C64::from_polar(1.0, -phases[i]));
        operators.push(v);
        states.push(state);
    }
    Ok(GuideEvolution {
        times: path.times().to_vec(),
        states,
        phases: Some(phases),
        operators: Some(operators),
    })
}

/// Direct RK4 integration of i ∂_t|ψ⟩ = H_eff(t)|ψ⟩ on the path grid with
/// internal substepping; the effective field between samples comes from a
/// cubic Hermite interpolant of its sampled components.
pub fn evolve_direct(
    path: &WaveVectorPath,
    rep: &AngularMomentumRep,
    initial_state: &Array1<C64>,
) -> Result<GuideEvolution> {
    if initial_state.len() != rep.dim() {
        return Err(Error::GridMismatch {
            left: initial_state.len(),
            right: rep.dim(),
        });
    }
    let norm_sq: f64 = initial_state.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization { norm_sq });
    }

    let b = effective_field(path);
    let t = path.times();
    let bx: Vec<f64> = b.iter().map(|v| v[0]).collect();
    let by: Vec<f64> = b.iter().map(|v| v[1]).collect();
    let bz: Vec<f64> = b.iter().map(|v| v[2]).collect();
    let hx = CubicHermite::new(t, &bx);
    let hy = CubicHermite::new(t, &by);
    let hz = CubicHermite::new(t, &bz);
    let b_max = b.iter().map(|v| norm(*v)).fold(0.0, f64::max);
    let gen_scale = b_max * rep.j().max(0.5);

    let rhs = |time: f64, psi: &Array1<C64>| -> Array1<C64> {
        let field = [hx.eval(time), hy.eval(time), hz.eval(time)];
        // i ψ̇ = (−B·J) ψ  ⇒  ψ̇ = i (B·J) ψ
        rep.dot_j(field).dot(psi).mapv(|z| z * C64::new(0.0, 1.0))
    };

    let mut states = Vec::with_capacity(path.len());
    let mut psi = initial_state.clone();
    states.push(psi.clone());
    for i in 1..path.len() {
        let (t0, t1) = (t[i - 1], t[i]);
        let h = t1 - t0;
        let n_sub = ((gen_scale * h / 0.01).ceil() as usize).max(2);
        if n_sub > 10_000_000 {
            return Err(Error::IntegrationFailure(format!(
                "step size underflow: {n_sub} substeps required on one interval"
            )));
        }
        let hs = h / n_sub as f64;
        for k in 0..n_sub {
            psi = linalg::rk4_step(&rhs, t0 + k as f64 * hs, &psi, hs);
        }
        states.push(psi.clone());
    }
    Ok(GuideEvolution {
        times: t.to_vec(),
        states,
        phases: None,
        operators: None,
    })
}

/// ⟨ψ| n(t)·J |ψ⟩ at one sample of an evolution (real; the operator is
/// Hermitian). Constant and equal to m along the closed-form output.
pub fn direction_projection(
    path: &WaveVectorPath,
    rep: &AngularMomentumRep,
    evolution: &GuideEvolution,
    sample_index: usize,
) -> f64 {
    let op = rep.dot_j(path.direction(sample_index));
    let psi = &evolution.states[sample_index];
    let applied = op.dot(psi);
    psi.iter()
        .zip(applied.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    /// Direction-sampled helix: constant θ, φ = ω t + φ₀.
    fn helix_direction_path(
        theta: f64,
        omega: f64,
        phi0: f64,
        turns: f64,
        samples_per_turn: usize,
        k: f64,
    ) -> WaveVectorPath {
        let n = (turns * samples_per_turn as f64).round() as usize + 1;
        let period = TAU / omega;
        let dt = period / samples_per_turn as f64;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let thetas = vec![theta; n];
        let phis: Vec<f64> = times.iter().map(|&t| omega * t + phi0).collect();
        WaveVectorPath::new(times, thetas, phis, k).unwrap()
    }

    /// Position-sampled helix centerline r(t) = (R cos ωt, R sin ωt, c t).
    fn helix_centerline(
        radius: f64,
        omega: f64,
        climb: f64,
        turns: f64,
        samples_per_turn: usize,
    ) -> Vec<Vec3> {
        let n = (turns * samples_per_turn as f64).round() as usize + 1;
        let dt = TAU / omega / samples_per_turn as f64;
        (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                [
                    radius * (omega * t).cos(),
                    radius * (omega * t).sin(),
                    climb * t,
                ]
            })
            .collect()
    }

    fn fidelity(a: &Array1<C64>, b: &Array1<C64>) -> f64 {
        let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        overlap.norm_sqr()
    }

    #[test]
    fn straight_centerline_is_polar() {
        let points: Vec<Vec3> = (0..8).map(|i| [0.0, 0.0, 0.1 * i as f64]).collect();
        let mass = 1.443e-25;
        let speed = 0.02;
        let path = path_from_centerline(&points, speed, mass).unwrap();
        for i in 0..path.len() {
            assert!(path.theta()[i].abs() < 1e-12);
            assert_eq!(path.phi()[i], 0.0);
        }
        let k_expected = mass * speed / HBAR;
        assert!((path.k_modulus() - k_expected).abs() < 1e-6 * k_expected);
    }

    #[test]
    fn planar_circle_angles() {
        let n = 400;
        let points: Vec<Vec3> = (0..=n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let path = path_from_centerline(&points, 1.0, 1e-25).unwrap();
        for i in 0..path.len() {
            assert!((path.theta()[i] - PI / 2.0).abs() < 1e-10, "sample {i}");
        }
        // One-sided tangent stencils at the two ends give O(h²) azimuth error.
        let total = path.phi()[path.len() - 1] - path.phi()[0];
        assert!((total - TAU).abs() < 1e-4);
    }

    #[test]
    fn helix_tangent_matches_analytic() {
        // r(t) = (R cos ωt, R sin ωt, ct): tangent polar angle arctan(Rω/c),
        // azimuth ωt + π/2.
        let (radius, omega, climb) = (0.4, TAU, 0.9);
        let points = helix_centerline(radius, omega, climb, 2.0, 500);
        let speed = (radius * omega).hypot(climb);
        let path = path_from_centerline(&points, speed, 1e-25).unwrap();
        let theta_exact = (radius * omega / climb).atan();
        let dt = TAU / omega / 500.0;
        for i in 2..path.len() - 2 {
            assert!((path.theta()[i] - theta_exact).abs() < 1e-5, "sample {i}");
            let phi_exact = omega * (i as f64) * dt + PI / 2.0;
            assert!((path.phi()[i] - phi_exact).abs() < 1e-5, "sample {i}");
        }
    }

    #[test]
    fn centerline_input_errors() {
        let three: Vec<Vec3> = vec![[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        assert!(matches!(
            path_from_centerline(&three, 1.0, 1.0),
            Err(Error::InsufficientData { needed: 4, .. })
        ));
        let coincident: Vec<Vec3> = vec![
            [0.0; 3],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
        ];
        assert!(matches!(
            path_from_centerline(&coincident, 1.0, 1.0),
            Err(Error::DegenerateTangent { index: 1 })
        ));
    }

    #[test]
    fn effective_field_straight_is_zero() {
        let times: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let path = WaveVectorPath::new(times, vec![0.0; 10], vec![0.0; 10], 1.0).unwrap();
        for b in effective_field(&path) {
            assert_eq!(norm(b), 0.0);
        }
    }

    #[test]
    fn effective_field_helix_magnitude() {
        // Constant θ = π/3 precessing at φ̇ = 1 rad/s: |B_eff| = sin θ.
        let path = helix_direction_path(PI / 3.0, 1.0, 0.0, 1.0, 2000, 1.0);
        let b = effective_field(&path);
        let expected = (PI / 3.0).sin();
        for (i, bi) in b.iter().enumerate().skip(2).take(b.len() - 4) {
            assert!(
                (norm(*bi) - expected).abs() < 1e-5,
                "sample {i}: {}",
                norm(*bi)
            );
        }
        assert!((expected - 0.8660254).abs() < 1e-6);
    }

    #[test]
    fn effective_field_flips_under_reversal() {
        let path = helix_direction_path(PI / 4.0, 1.0, 0.3, 1.0, 300, 1.0);
        let n = path.len();
        // Reverse traversal: same directions in reverse order.
        let dirs: Vec<Vec3> = (0..n).map(|i| path.direction(n - 1 - i)).collect();
        let (theta, phi) = super::angles_from_directions(&dirs);
        let reversed = WaveVectorPath::new(path.times().to_vec(), theta, phi, 1.0).unwrap();
        let fwd = effective_field(&path);
        let bwd = effective_field(&reversed);
        for i in 2..n - 2 {
            let sum = add(fwd[i], bwd[n - 1 - i]);
            assert!(norm(sum) < 1e-6, "sample {i}");
        }
    }

    #[test]
    fn motion_identity_zero_for_straight() {
        let times: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let path = WaveVectorPath::new(times, vec![0.0; 16], vec![0.0; 16], 2.5).unwrap();
        assert_eq!(motion_identity_residual(&path), 0.0);
    }

    /// Helix centerline with a mild pitch modulation. A perfectly uniform
    /// helix is screw-symmetric, which cancels the O(h²) finite-difference
    /// term and superconverges (O(h³)); the modulation makes the precession
    /// rate vary so the generic second-order error is visible.
    fn modulated_helix_centerline(
        radius: f64,
        omega: f64,
        climb: f64,
        turns: f64,
        samples_per_turn: usize,
    ) -> Vec<Vec3> {
        let n = (turns * samples_per_turn as f64).round() as usize + 1;
        let dt = TAU / omega / samples_per_turn as f64;
        (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                [
                    radius * (omega * t).cos(),
                    radius * (omega * t).sin(),
                    climb * t + 0.2 * (climb / omega) * (omega * t).sin(),
                ]
            })
            .collect()
    }

    #[test]
    fn motion_identity_second_order_convergence() {
        // Position-sampled helix: the residual is pure finite-difference
        // error and shrinks ~4x when the sampling doubles.
        let theta = PI / 3.0;
        let (omega, climb) = (TAU, 1.0);
        let radius = climb * theta.tan() / omega;
        let res: Vec<f64> = [2000usize, 4000]
            .iter()
            .map(|&spt| {
                let pts = modulated_helix_centerline(radius, omega, climb, 3.0, spt);
                let path = path_from_centerline(&pts, 2.0, 1e-25).unwrap();
                motion_identity_residual(&path)
            })
            .collect();
        assert!(res[0] < 1e-5, "residual {}", res[0]);
        let ratio = res[0] / res[1];
        assert!(
            (2.8..5.7).contains(&ratio),
            "expected ~4x decrease, got {ratio} ({res:?})"
        );
    }

    #[test]
    fn hamiltonian_straight_zero_and_traceless() {
        let rep = AngularMomentumRep::new(3);
        let times: Vec<f64> = (0..8).map(|i| i as f64 * 0.2).collect();
        let path = WaveVectorPath::new(times, vec![0.0; 8], vec![0.0; 8], 1.0).unwrap();
        let h = effective_hamiltonian(&path, &rep, 4);
        assert!(h.iter().all(|z| z.norm() == 0.0));

        let curved = helix_direction_path(1.1, 2.0, 0.4, 1.0, 200, 1.0);
        for idx in [0, 50, 150] {
            let h = effective_hamiltonian(&curved, &rep, idx);
            assert!(crate::linalg::hermiticity_defect(&h) < 1e-12);
            let trace: C64 = (0..rep.dim()).map(|i| h[[i, i]]).sum();
            assert!(trace.norm() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_helix_eigenvalues_spin_half() {
        // (n×ṅ)·J for constant-θ precession has |field| = ω sinθ, so the
        // spin-1/2 eigenvalues are ±(ω sinθ)/2.
        let (theta, omega) = (PI / 3.0, TAU);
        let path = helix_direction_path(theta, omega, 0.0, 1.0, 4000, 1.0);
        let rep = AngularMomentumRep::new(1);
        let h = effective_hamiltonian(&path, &rep, 2000);
        // Closed-form eigenvalues of a traceless Hermitian 2x2: ±sqrt(−det).
        let det = (h[[0, 0]] * h[[1, 1]] - h[[0, 1]] * h[[1, 0]]).re;
        let eig = (-det).sqrt();
        assert!((eig - omega * theta.sin() / 2.0).abs() < 1e-5, "{eig}");
    }

    #[test]
    fn angular_momentum_commutators() {
        for twice_j in 1..=4u32 {
            let rep = AngularMomentumRep::new(twice_j);
            let comm_3p = rep.j3().dot(rep.jplus()) - rep.jplus().dot(rep.j3());
            let diff_p = &comm_3p - rep.jplus();
            assert!(diff_p.iter().all(|z| z.norm() < 1e-12), "2j={twice_j}");
            let comm_3m = rep.j3().dot(rep.jminus()) - rep.jminus().dot(rep.j3());
            let sum_m = &comm_3m + rep.jminus();
            assert!(sum_m.iter().all(|z| z.norm() < 1e-12));
            let comm_pm = rep.jplus().dot(rep.jminus()) - rep.jminus().dot(rep.jplus());
            let twice_j3 = rep.j3().mapv(|z| z * 2.0);
            let diff = &comm_pm - &twice_j3;
            assert!(diff.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn geometric_phase_polar_path_is_zero() {
        let times: Vec<f64> = (0..12).map(|i| i as f64 * 0.1).collect();
        let path = WaveVectorPath::new(times, vec![0.0; 12], vec![0.0; 12], 1.0).unwrap();
        let ph = geometric_phase(&path, 1);
        assert!(ph.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn geometric_phase_helix_turn() {
        // One turn at θ = π/3, m = 1/2: 2π·(1/2)·(1 − cos π/3) = π/2.
        let path = helix_direction_path(PI / 3.0, TAU, 0.0, 1.0, 2000, 1.0);
        let ph = geometric_phase(&path, 1);
        assert!((ph[path.len() - 1] - PI / 2.0).abs() < 1e-10);
    }

    /// Signed solid angle of the closed spherical polygon via a triangle fan
    /// from +z (valid for loops winding once around the pole).
    fn solid_angle_fan(dirs: &[Vec3]) -> f64 {
        let apex = [0.0, 0.0, 1.0];
        let mut total = 0.0;
        for w in dirs.windows(2) {
            let (b, c) = (w[0], w[1]);
            let numer = dot(apex, cross(b, c));
            let denom = 1.0 + dot(apex, b) + dot(b, c) + dot(c, apex);
            total += 2.0 * numer.atan2(denom);
        }
        total
    }

    #[test]
    fn geometric_phase_matches_solid_angle_oracle() {
        // Smooth wobbling loop winding once around +z.
        let n = 6000;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let theta: Vec<f64> = times
            .iter()
            .map(|&t| PI / 3.0 + 0.3 * (2.0 * TAU * t).sin())
            .collect();
        let phi: Vec<f64> = times
            .iter()
            .map(|&t| TAU * t + 0.2 * (3.0 * TAU * t).sin())
            .collect();
        let path = WaveVectorPath::new(times, theta, phi, 1.0).unwrap();
        let dirs: Vec<Vec3> = (0..path.len()).map(|i| path.direction(i)).collect();
        let oracle = solid_angle_fan(&dirs);
        let ph = geometric_phase(&path, 1); // m = 1/2
        assert!(
            (ph[path.len() - 1] - 0.5 * oracle).abs() < 1e-6,
            "phase {} vs m*solid angle {}",
            ph[path.len() - 1],
            0.5 * oracle
        );
    }

    #[test]
    fn geometric_phase_reparameterization_invariant() {
        // Same direction loop traversed with a warped speed profile. The
        // quadrature bias is O(h²), so the grid must be fine for 1e-8.
        let n = 40000;
        let warp = |s: f64| s + 0.25 * (TAU * s).sin() / TAU;
        let build = |warped: bool| {
            let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let ss: Vec<f64> = times
                .iter()
                .map(|&t| if warped { warp(t) } else { t })
                .collect();
            let theta: Vec<f64> = ss
                .iter()
                .map(|&s| PI / 4.0 + 0.2 * (TAU * s).cos())
                .collect();
            let phi: Vec<f64> = ss.iter().map(|&s| TAU * s).collect();
            let path = WaveVectorPath::new(times, theta, phi, 1.0).unwrap();
            let ph = geometric_phase(&path, 1);
            ph[path.len() - 1]
        };
        assert!((build(false) - build(true)).abs() < 1e-8);
    }

    #[test]
    fn rotation_operator_identity_and_pi() {
        let rep = AngularMomentumRep::new(1);
        let v0 = rotation_operator(0.0, 1.3, &rep);
        assert!((v0[[0, 0]] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v0[[0, 1]].norm() < 1e-15);

        let vpi = rotation_operator(PI, 0.0, &rep);
        assert!((vpi[[0, 0]]).norm() < 1e-12);
        assert!((vpi[[0, 1]] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((vpi[[1, 0]] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((vpi[[1, 1]]).norm() < 1e-12);
    }

    #[test]
    fn rotation_operator_unitary() {
        for twice_j in [1u32, 2, 3, 4] {
            let rep = AngularMomentumRep::new(twice_j);
            for (theta, phi) in [(0.3, 1.2), (2.9, -4.0), (1.5707, 0.0), (0.01, 12.0)] {
                let v = rotation_operator(theta, phi, &rep);
                let vdag = v.t().mapv(|z| z.conj());
                let prod = vdag.dot(&v);
                for i in 0..rep.dim() {
                    for j in 0..rep.dim() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!(
                            (prod[[i, j]] - C64::new(want, 0.0)).norm() < 1e-12,
                            "2j={twice_j} θ={theta}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn evolve_straight_path_constant() {
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        let path = WaveVectorPath::new(times, vec![0.0; 20], vec![0.0; 20], 1.0).unwrap();
        let rep = AngularMomentumRep::new(1);
        let evo = evolve_closed_form(&path, &rep, 1).unwrap();
        let phases = evo.phases.as_ref().unwrap();
        assert!(phases.iter().all(|&p| p == 0.0));
        for s in &evo.states {
            assert!((s[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
            assert!(s[1].norm() < 1e-14);
        }
        let direct = evolve_direct(&path, &rep, &evo.states[0]).unwrap();
        for s in &direct.states {
            assert!((s[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn evolve_requires_polar_start() {
        let path = helix_direction_path(PI / 3.0, TAU, 0.0, 1.0, 100, 1.0);
        let rep = AngularMomentumRep::new(1);
        assert!(matches!(
            evolve_closed_form(&path, &rep, 1),
            Err(Error::InitialCondition { .. })
        ));
    }

    #[test]
    fn closed_form_matches_direct_integration() {
        // Rotated helix (θ(0) = 0), spin 1/2, m = +1/2.
        let path = helix_direction_path(PI / 3.0, TAU, 0.0, 2.0, 2000, 1.0)
            .rotated_to_initial_z()
            .unwrap();
        let rep = AngularMomentumRep::new(1);
        let cf = evolve_closed_form(&path, &rep, 1).unwrap();
        let direct = evolve_direct(&path, &rep, &cf.states[0]).unwrap();
        assert!(direct.norm_drift() < 1e-9, "drift {}", direct.norm_drift());
        let mut worst = 0.0f64;
        for (a, b) in cf.states.iter().zip(&direct.states) {
            worst = worst.max(1.0 - fidelity(a, b));
        }
        assert!(worst < 1e-8, "max infidelity {worst}");
    }

    #[test]
    fn direction_projection_is_invariant() {
        let path = helix_direction_path(PI / 3.0, TAU, 0.5, 1.5, 1500, 1.0)
            .rotated_to_initial_z()
            .unwrap();
        for twice_j in [1u32, 2, 3] {
            let rep = AngularMomentumRep::new(twice_j);
            let twice_m = twice_j as i32; // stretched state m = +j
            let evo = evolve_closed_form(&path, &rep, twice_m).unwrap();
            for idx in [0, path.len() / 3, path.len() - 1] {
                let proj = direction_projection(&path, &rep, &evo, idx);
                assert!(
                    (proj - twice_m as f64 / 2.0).abs() < 1e-8,
                    "2j={twice_j} idx={idx}: {proj}"
                );
            }
        }
    }

    #[test]
    fn rotated_path_preserves_mutual_angles() {
        let path = helix_direction_path(1.2, 3.0, 0.7, 1.0, 200, 1.0);
        let rotated = path.rotated_to_initial_z().unwrap();
        assert!(rotated.theta()[0] < 1e-9);
        for i in 1..path.len() {
            let a = dot(path.direction(i - 1), path.direction(i));
            let b = dot(rotated.direction(i - 1), rotated.direction(i));
            assert!((a - b).abs() < 1e-12);
        }
    }
}
