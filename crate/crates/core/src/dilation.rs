//! Hermitian dilation of a non-Hermitian `H`: a qubit ancilla is attached and
//! the system evolves under `H_tot = Xi (x) |1><1| + Lambda (x) |0><0|` so that
//! the `|->` component follows `i d/dt psi = s H psi`.

use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    dagger, expm, hermiticity_defect, hermitian_sqrt, min_hermitian_eigenvalue, real, solve_symmetric_sylvester,
    vnorm, CMat3, CVec3, C64, I,
};

pub type CMat6 = SMatrix<C64, 6, 6>;
pub type CVec6 = SVector<C64, 6>;

/// Smallest admissible eigenvalue of `M - I`.
pub const METRIC_FLOOR: f64 = 1e-8;

const MAX_HALVINGS: usize = 12;
const RESIDUAL_STABLE: f64 = 1e-10;

/// `e^{-i H† t} M0 e^{i H t}`.
pub fn metric_m(h: &CMat3, t: f64, m0: &CMat3) -> CMat3 {
    expm(&(dagger(h) * (-I * t))) * m0 * expm(&(h * (I * t)))
}

/// Dilation operators at one time.
#[derive(Debug, Clone, Copy)]
pub struct DilationPoint {
    pub xi: CMat3,
    pub lambda: CMat3,
    pub eta: CMat3,
    pub eta_dot: CMat3,
    pub m: CMat3,
}

/// Operators at time `t` for the scaled Hamiltonian `hs = s H`.
pub fn dilation_at(hs: &CMat3, t: f64, m0: &CMat3) -> Result<DilationPoint> {
    let m = metric_m(hs, t, m0);
    let id = CMat3::identity();
    let min_eig = min_hermitian_eigenvalue(&(m - id));
    if !(min_eig >= METRIC_FLOOR) {
        return Err(Error::MetricDegenerate { t, min_eig });
    }
    let m_dot = (m * hs - dagger(hs) * m) * I;
    let eta = hermitian_sqrt(&(m - id));
    let eta_dot = solve_symmetric_sylvester(&eta, &m_dot);
    let m_inv = m.try_inverse().ok_or(Error::MetricDegenerate { t, min_eig })?;
    let lam_hat = (hs + (eta_dot * I + eta * hs) * eta) * m_inv;
    let xi_hat = (hs * eta - eta * hs - eta_dot * I) * m_inv * I;
    Ok(DilationPoint { xi: lam_hat + xi_hat, lambda: lam_hat - xi_hat, eta, eta_dot, m })
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationBundle {
    pub time_grid: Vec<f64>,
    #[serde(skip)]
    pub xi: Vec<CMat3>,
    #[serde(skip)]
    pub lambda: Vec<CMat3>,
    #[serde(skip)]
    pub eta: Vec<CMat3>,
    #[serde(skip)]
    pub m: Vec<CMat3>,
    pub scale_s: f64,
}

impl DilationBundle {
    pub fn len(&self) -> usize {
        self.time_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_grid.is_empty()
    }

    /// Largest entrywise anti-Hermitian part over all `Xi`, `Lambda`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.xi.iter().chain(&self.lambda).map(hermiticity_defect).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of `M - I` over the grid.
    pub fn metric_margin(&self) -> f64 {
        self.m
            .iter()
            .map(|m| min_hermitian_eigenvalue(&(m - CMat3::identity())))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Samples the dilation of `s H` on `steps + 1` equally spaced times in `[0, T]`.
pub fn build_dilation(h: &CMat3, t_final: f64, m0: &CMat3, steps: usize, s: f64) -> Result<DilationBundle> {
    if !(t_final > 0.0 && t_final.is_finite()) || steps == 0 {
        return Err(Error::InvalidInput("need T > 0 and steps >= 1".into()));
    }
    if s == 0.0 || !s.is_finite() {
        return Err(Error::InvalidInput("scale s must be nonzero".into()));
    }
    if hermiticity_defect(m0) > 1e-12 || min_hermitian_eigenvalue(m0) <= 0.0 {
        return Err(Error::InvalidInput("M0 must be Hermitian positive definite".into()));
    }
    let hs = h * real(s);
    let mut b = DilationBundle {
        time_grid: Vec::with_capacity(steps + 1),
        xi: Vec::with_capacity(steps + 1),
        lambda: Vec::with_capacity(steps + 1),
        eta: Vec::with_capacity(steps + 1),
        m: Vec::with_capacity(steps + 1),
        scale_s: s,
    };
    for j in 0..=steps {
        let t = t_final * j as f64 / steps as f64;
        let p = dilation_at(&hs, t, m0)?;
        b.time_grid.push(t);
        b.xi.push(p.xi);
        b.lambda.push(p.lambda);
        b.eta.push(p.eta);
        b.m.push(p.m);
    }
    Ok(b)
}

/// Ancilla `|+>` and `|->`, eigenstates of `sigma_y` with the phase fixed so
/// that `(|1><1| - |0><0|) |-> = i |+>`.
pub fn ancilla_states() -> ([C64; 2], [C64; 2]) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ([real(r), C64::new(0.0, r)], [C64::new(0.0, -r), real(-r)])
}

/// `a (x) b`, system index major.
fn kron_vec(a: &CVec3, b: &[C64; 2]) -> CVec6 {
    CVec6::from_fn(|k, _| a[k / 2] * b[k % 2])
}

pub fn total_hamiltonian(p: &DilationPoint) -> CMat6 {
    CMat6::from_fn(|r, c| {
        if r % 2 != c % 2 {
            return C64::new(0.0, 0.0);
        }
        let op = if r % 2 == 1 { &p.xi } else { &p.lambda };
        op[(r / 2, c / 2)]
    })
}

/// `(1 (x) <-|) Psi`.
fn project_minus(psi: &CVec6) -> CVec3 {
    let (_, minus) = ancilla_states();
    CVec3::from_fn(|k, _| minus[0].conj() * psi[2 * k] + minus[1].conj() * psi[2 * k + 1])
}

fn direction_mismatch(a: &CVec3, b: &CVec3) -> f64 {
    let ov: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    (1.0 - ov.norm() / (vnorm(a) * vnorm(b))).max(0.0)
}

fn rk4_residual(hs: &CMat3, m0: &CMat3, psi0: &CVec3, t_final: f64, n: usize) -> Result<f64> {
    let (plus, minus) = ancilla_states();
    let eta0 = hermitian_sqrt(&(m0 - CMat3::identity()));
    let mut psi = kron_vec(psi0, &minus) + kron_vec(&(eta0 * psi0), &plus);
    let dt = t_final / n as f64;
    let f = |t: f64, v: &CVec6| -> Result<CVec6> { Ok(total_hamiltonian(&dilation_at(hs, t, m0)?) * v * (-I)) };
    let step_nh = expm(&(hs * (-I * dt)));
    let mut target = *psi0;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let t = j as f64 * dt;
        let k1 = f(t, &psi)?;
        let k2 = f(t + 0.5 * dt, &(psi + k1 * real(0.5 * dt)))?;
        let k3 = f(t + 0.5 * dt, &(psi + k2 * real(0.5 * dt)))?;
        let k4 = f(t + dt, &(psi + k3 * real(dt)))?;
        psi += (k1 + k2 * real(2.0) + k3 * real(2.0) + k4) * real(dt / 6.0);
        target = step_nh * target;
        worst = worst.max(direction_mismatch(&project_minus(&psi), &target));
    }
    Ok(worst)
}

/// Evolves `psi0 (x) (|-> + eta(0) |+>)` under `H_tot` with RK4, halving the
/// step until the answer settles, and returns the largest direction mismatch
/// between the `|->` component and direct evolution under `s H`.
pub fn verify_embedding(bundle: &DilationBundle, h: &CMat3, psi0: &CVec3, t_final: f64) -> Result<f64> {
    if bundle.is_empty() || vnorm(psi0) == 0.0 {
        return Err(Error::InvalidInput("need a non-empty bundle and nonzero psi0".into()));
    }
    let hs = h * real(bundle.scale_s);
    let m0 = bundle.m[0];
    let mut n = (bundle.len() - 1).max(1);
    let mut prev = rk4_residual(&hs, &m0, psi0, t_final, n)?;
    for _ in 0..MAX_HALVINGS {
        n *= 2;
        let cur = rk4_residual(&hs, &m0, psi0, t_final, n)?;
        if (cur - prev).abs() < RESIDUAL_STABLE {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}
