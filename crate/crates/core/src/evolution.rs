//! Non-Hermitian time evolution, eigenstate selection by `g(H)` dynamics,
//! density matrices and fidelity.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c, expm, hermitian_eigen, hermitian_sqrt, inner, min_singular_value, normalized, ray_sine,
    real, vnorm, CMat3, CVec3, C64, I,
};
use crate::spectral::char_poly;

/// Sampled solution of `i dpsi/dt = H psi`. `states` hold unit directions and
/// `log_norms` the accumulated log of the true norm, so the unnormalized
/// state is `states[j] * exp(log_norms[j])`.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVec3>,
    pub norms: Vec<f64>,
    pub log_norms: Vec<f64>,
}

impl StateTrajectory {
    /// Unnormalized state at sample `j` (may overflow for long growth).
    pub fn state(&self, j: usize) -> CVec3 {
        self.states[j] * real(self.log_norms[j].exp())
    }
}

pub fn evolve_nh(h: &CMat3, psi0: &CVec3, t: f64, steps: usize) -> Result<StateTrajectory> {
    let n0 = vnorm(psi0);
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::InvalidInput("initial state must be nonzero".into()));
    }
    if steps == 0 || !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput("need steps >= 1 and finite T >= 0".into()));
    }
    let dt = t / steps as f64;
    let u = expm(&(h * (-I * dt)));
    let mut v = psi0 / real(n0);
    let mut log = n0.ln();
    let mut out = StateTrajectory {
        times: vec![0.0],
        states: vec![v],
        norms: vec![1.0],
        log_norms: vec![log],
    };
    for j in 1..=steps {
        v = u * v;
        let n = vnorm(&v);
        log += n.ln();
        v /= real(n);
        out.times.push(j as f64 * dt);
        out.states.push(v);
        out.norms.push(vnorm(&v));
        out.log_norms.push(log);
    }
    Ok(out)
}

/// Spectral transform driving the selection dynamics `i dpsi/dt = g(H) psi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Selector {
    H,
    MinusH,
    IH,
    MinusIH,
    /// `sign * i (H - shift)^-1`
    Resolvent { shift: C64, sign: i8 },
}

impl Selector {
    /// `g(E)`; the dynamics amplifies the eigenvector with largest `Im g(E)`.
    pub fn apply_scalar(&self, e: C64) -> C64 {
        match *self {
            Selector::H => e,
            Selector::MinusH => -e,
            Selector::IH => I * e,
            Selector::MinusIH => -I * e,
            Selector::Resolvent { shift, sign } => I * f64::from(sign) / (e - shift),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub vector: CVec3,
    pub eigenvalue: C64,
    pub converged: bool,
    pub time: f64,
}

pub const DEFAULT_T_MAX: f64 = 200.0;
pub const DEFAULT_TOL: f64 = 1e-8;

const DT: f64 = 0.05;
const CHECK_EVERY: usize = 40;

/// Evolves under `g(H)` until the direction settles, then estimates the
/// eigenvalue by a Rayleigh quotient polished with one Newton step on the
/// characteristic polynomial.
pub fn steady_eigenstate(
    h: &CMat3,
    g: Selector,
    psi0: &CVec3,
    t_max: f64,
    tol: f64,
) -> Result<SteadyState> {
    if !(vnorm(psi0) > 0.0) {
        return Err(Error::InvalidInput("initial state must be nonzero".into()));
    }
    if !(t_max > 0.0 && tol > 0.0) {
        return Err(Error::InvalidInput("need T_max > 0 and tol > 0".into()));
    }
    let step: Box<dyn Fn(&CVec3) -> CVec3> = match g {
        Selector::Resolvent { shift, sign } => {
            if !(sign == 1 || sign == -1) {
                return Err(Error::InvalidInput("resolvent sign must be +1 or -1".into()));
            }
            let a = h - CMat3::identity() * shift;
            if min_singular_value(&a) <= 1e-8 {
                return Err(Error::InvalidInput("shift too close to the spectrum".into()));
            }
            let lu = a.lu();
            let s = f64::from(sign);
            // dpsi/dt = -i g psi = s (H - shift)^-1 psi, integrated with RK4
            let f = move |v: &CVec3| lu.solve(v).expect("nonsingular") * real(s);
            Box::new(move |v: &CVec3| {
                let k1 = f(v);
                let k2 = f(&(v + k1 * real(DT / 2.0)));
                let k3 = f(&(v + k2 * real(DT / 2.0)));
                let k4 = f(&(v + k3 * real(DT)));
                v + (k1 + k2 * real(2.0) + k3 * real(2.0) + k4) * real(DT / 6.0)
            })
        }
        _ => {
            let gm = match g {
                Selector::H => *h,
                Selector::MinusH => -h,
                Selector::IH => h * I,
                _ => h * (-I),
            };
            let u = expm(&(gm * (-I * DT)));
            Box::new(move |v: &CVec3| u * v)
        }
    };

    let mut v = normalized(psi0);
    let mut last_check = v;
    let mut t = 0.0;
    let mut converged = false;
    let mut n = 0usize;
    while t < t_max {
        v = normalized(&step(&v));
        t += DT;
        n += 1;
        if n % CHECK_EVERY == 0 {
            if ray_sine(&v, &last_check) < tol {
                converged = true;
                break;
            }
            last_check = v;
        }
    }
    let rayleigh = inner(&v, &(h * v)) / inner(&v, &v);
    let cp = char_poly(h);
    let d = cp.derivative(rayleigh);
    let newton = if d.norm() > 1e-12 { rayleigh - cp.eval(rayleigh) / d } else { rayleigh };
    // keep the Newton step only if it improves the fit
    let eigenvalue = if cp.eval(newton).norm() < cp.eval(rayleigh).norm() { newton } else { rayleigh };
    Ok(SteadyState { vector: v, eigenvalue, converged, time: t })
}

/// Unit-trace Hermitian positive semi-definite 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub CMat3);

pub fn density_matrix(psi: &CVec3) -> DensityMatrix {
    let n2 = inner(psi, psi);
    DensityMatrix(psi * psi.adjoint() / n2)
}

/// `[Tr sqrt(sqrt(a) b sqrt(a))]^2`, clipped to `[0, 1]`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let sa = hermitian_sqrt(&a.0);
    let inner_m = sa * b.0 * sa;
    let tr = hermitian_sqrt(&inner_m).trace().re;
    (tr * tr).clamp(0.0, 1.0)
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Nearest density matrix in Frobenius norm: the spectrum is projected onto
/// the probability simplex in the matrix's own eigenbasis.
pub fn psd_project(raw: &CMat3) -> DensityMatrix {
    let (vals, vecs) = hermitian_eigen(raw);
    let p = simplex_projection(vals.as_slice());
    let d = CMat3::from_diagonal(&Vector3::new(real(p[0]), real(p[1]), real(p[2])));
    let m = vecs * d * vecs.adjoint();
    DensityMatrix((m + m.adjoint()) * c(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, max_abs};
    use crate::model::{hamiltonian, ModelParams};
    use crate::spectral::eigensolve;
    use proptest::prelude::*;

    fn v(a: C64, b: C64, cc: C64) -> CVec3 {
        CVec3::new(a, b, cc)
    }

    #[test]
    fn hermitian_preserves_norm() {
        let h = CMat3::new(
            real(1.0), c(0.2, 0.3), real(0.0),
            c(0.2, -0.3), real(-0.5), c(0.0, 0.4),
            real(0.0), c(0.0, -0.4), real(0.1),
        );
        let tr = evolve_nh(&h, &v(real(1.0), c(0.0, 1.0), real(0.5)), 10.0, 200).unwrap();
        let n0 = tr.log_norms[0];
        assert!(tr.log_norms.iter().all(|l| (l - n0).abs() < 1e-9));
    }

    #[test]
    fn diagonal_decay_ratios() {
        let h = CMat3::from_diagonal(&v(c(0.0, -1.0), c(0.0, -2.0), c(0.0, -3.0)));
        let tr = evolve_nh(&h, &v(real(1.0), real(1.0), real(1.0)), 2.0, 20).unwrap();
        for (j, &t) in tr.times.iter().enumerate() {
            let s = tr.states[j];
            assert!(((s[1] / s[0]).re - (-t).exp()).abs() < 1e-12);
            assert!(((s[2] / s[0]).re - (-2.0 * t).exp()).abs() < 1e-12);
            let full = tr.state(j);
            assert!((full[0].re - (-t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_stays_put() {
        let h = hamiltonian(&ModelParams::new(0.39, 0.9, -0.4).unwrap());
        let s = eigensolve(&h, true);
        let (e, psi) = (s.eigenvalues[1], s.eigenvectors.unwrap()[1]);
        let tr = evolve_nh(&h, &psi, 5.0, 50).unwrap();
        for (j, &t) in tr.times.iter().enumerate() {
            assert!(ray_sine(&tr.states[j], &psi) < 1e-9);
            assert!(crate::linalg::ray_mismatch(&tr.states[j], &psi) < 1e-12);
            assert!((tr.log_norms[j] - e.im * t).abs() < 1e-9);
        }
    }

    #[test]
    fn semigroup() {
        let h = hamiltonian(&ModelParams::new(1.2, 0.3, 0.5).unwrap());
        let p0 = v(real(0.3), c(0.1, 0.8), real(-0.2));
        let full = evolve_nh(&h, &p0, 3.0, 30).unwrap();
        let a = evolve_nh(&h, &p0, 1.0, 10).unwrap();
        let b = evolve_nh(&h, &a.state(10), 2.0, 20).unwrap();
        let x = full.state(30);
        let y = b.state(20);
        assert!(vnorm(&(x - y)) < 1e-9 * vnorm(&x));
    }

    #[test]
    fn linearity() {
        let h = hamiltonian(&ModelParams::new(2.0, -0.3, 0.2).unwrap());
        let p0 = v(real(1.0), c(0.5, 0.5), real(0.0));
        let a = c(2.0, -1.5);
        let x = evolve_nh(&h, &p0, 2.0, 40).unwrap().state(40) * a;
        let y = evolve_nh(&h, &(p0 * a), 2.0, 40).unwrap().state(40);
        assert!(vnorm(&(x - y)) < 1e-10 * vnorm(&x));
    }

    #[test]
    fn rejects_zero_state() {
        let h = CMat3::identity();
        assert!(evolve_nh(&h, &CVec3::zeros(), 1.0, 1).is_err());
    }

    fn argmax_by(ev: &[C64; 3], f: impl Fn(C64) -> f64) -> usize {
        (0..3).max_by(|&a, &b| f(ev[a]).total_cmp(&f(ev[b]))).unwrap()
    }

    #[test]
    fn selects_max_imaginary_part() {
        let h = hamiltonian(&ModelParams::new(0.39, 0.8, 0.6).unwrap());
        let s = eigensolve(&h, true);
        let k = argmax_by(&s.eigenvalues, |e| e.im);
        let p0 = v(real(1.0), c(0.3, -0.2), c(0.5, 0.1));
        let r = steady_eigenstate(&h, Selector::H, &p0, DEFAULT_T_MAX, DEFAULT_TOL).unwrap();
        assert!(r.converged);
        let f = fidelity(&density_matrix(&r.vector), &density_matrix(&s.eigenvectors.unwrap()[k]));
        assert!(f > 0.999);
        assert!((r.eigenvalue - s.eigenvalues[k]).norm() < 1e-6);
        assert!(vnorm(&(h * r.vector - r.vector * r.eigenvalue)) / crate::linalg::fro(&h) < 10.0 * DEFAULT_TOL);
    }

    #[test]
    fn selectors_pick_distinct_states() {
        let gs = [Selector::H, Selector::IH, Selector::MinusIH];
        // first grid point where the three orderings single out different bands
        let (h, s) = (0..400)
            .map(|n| ModelParams::new(0.39, -2.0 + 0.2 * (n % 20) as f64, -2.0 + 0.2 * (n / 20) as f64).unwrap())
            .map(|p| {
                let h = hamiltonian(&p);
                (h, eigensolve(&h, false))
            })
            .find(|(_, s)| {
                let mut w: Vec<_> = gs.iter().map(|g| argmax_by(&s.eigenvalues, |e| g.apply_scalar(e).im)).collect();
                w.sort();
                w.dedup();
                w.len() == 3
            })
            .unwrap();
        let p0 = v(real(1.0), c(0.3, -0.2), c(0.5, 0.1));
        let mut picked = Vec::new();
        for g in gs {
            let want = argmax_by(&s.eigenvalues, |e| g.apply_scalar(e).im);
            let r = steady_eigenstate(&h, g, &p0, DEFAULT_T_MAX, DEFAULT_TOL).unwrap();
            let got = (0..3)
                .min_by(|&a, &b| {
                    (s.eigenvalues[a] - r.eigenvalue).norm().total_cmp(&(s.eigenvalues[b] - r.eigenvalue).norm())
                })
                .unwrap();
            assert_eq!(got, want);
            picked.push(got);
        }
        picked.sort();
        picked.dedup();
        assert_eq!(picked.len(), 3);
    }

    #[test]
    fn resolvent_targets_nearest_to_shift() {
        let h = hamiltonian(&ModelParams::new(1.0, 0.7, 0.2).unwrap());
        let s = eigensolve(&h, false);
        for k in 0..3 {
            let shift = s.eigenvalues[k] + c(0.0, 0.05);
            let g = Selector::Resolvent { shift, sign: 1 };
            let want = argmax_by(&s.eigenvalues, |e| g.apply_scalar(e).im);
            let r = steady_eigenstate(&h, g, &v(real(1.0), real(0.4), c(0.2, 0.7)), DEFAULT_T_MAX, DEFAULT_TOL)
                .unwrap();
            assert!((r.eigenvalue - s.eigenvalues[want]).norm() < 1e-6);
        }
        let bad = Selector::Resolvent { shift: s.eigenvalues[0], sign: 1 };
        assert!(steady_eigenstate(&h, bad, &v(real(1.0), real(0.0), real(0.0)), 10.0, 1e-8).is_err());
    }

    #[test]
    fn ep3_converges_slowly() {
        let h = hamiltonian(&ModelParams::new(3.0, 0.0, 0.0).unwrap());
        let r = steady_eigenstate(&h, Selector::H, &v(real(1.0), real(0.0), real(0.0)), 50.0, 1e-8).unwrap();
        let want = v(real(-1.0), c(0.0, -2f64.sqrt()), real(1.0));
        // algebraic approach: close in direction, but not within tolerance
        assert!(!r.converged);
        assert!(ray_sine(&r.vector, &want) < 0.2);
    }

    #[test]
    fn fidelity_basics() {
        let a = density_matrix(&v(real(1.0), c(0.0, 1.0), real(0.0)));
        assert!((fidelity(&a, &a) - 1.0).abs() < 1e-10);
        let b = density_matrix(&v(real(1.0), c(0.0, -1.0), real(0.0)));
        assert!(fidelity(&a, &b) < 1e-10);
        let m = density_matrix(&v(real(0.0), real(0.0), real(1.0)));
        let mixed = DensityMatrix((a.0 + m.0) * real(0.5));
        assert!((fidelity(&mixed, &a) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn simplex_oracle() {
        // 1.1, 0.1, -0.2: theta = 0.1 keeps the top two, giving (1.0, 0.0, 0.0)
        let p = psd_project(&CMat3::from_diagonal(&v(real(1.1), real(0.1), real(-0.2))));
        assert!(max_abs(&(p.0 - CMat3::from_diagonal(&v(real(1.0), real(0.0), real(0.0))))) < 1e-12);
        let q = simplex_projection(&[0.6, 0.5, -0.1]);
        assert!((q[0] - 0.55).abs() < 1e-12 && (q[1] - 0.45).abs() < 1e-12 && q[2] == 0.0);
    }

    #[test]
    fn valid_rho_unchanged() {
        let a = density_matrix(&v(real(1.0), c(0.3, 0.2), real(-0.5)));
        let b = density_matrix(&v(real(0.0), real(1.0), c(0.0, 1.0)));
        let rho = (a.0 * real(0.7)) + (b.0 * real(0.3));
        assert!(max_abs(&(psd_project(&rho).0 - rho)) < 1e-12);
    }

    proptest! {
        #[test]
        fn fidelity_symmetric_in_unit_range(
            a in prop::array::uniform6(-1.0..1.0f64),
            b in prop::array::uniform6(-1.0..1.0f64),
        ) {
            let va = v(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5]));
            let vb = v(c(b[0], b[1]), c(b[2], b[3]), c(b[4], b[5]));
            prop_assume!(vnorm(&va) > 1e-3 && vnorm(&vb) > 1e-3);
            let (ra, rb) = (density_matrix(&va), density_matrix(&vb));
            let f1 = fidelity(&ra, &rb);
            let f2 = fidelity(&rb, &ra);
            prop_assert!((f1 - f2).abs() < 1e-8);
            prop_assert!((0.0..=1.0).contains(&f1));
            // pure states: overlap squared
            let ov = inner(&va, &vb).norm_sqr() / (inner(&va, &va).re * inner(&vb, &vb).re);
            prop_assert!((f1 - ov).abs() < 1e-6);
        }

        #[test]
        fn noisy_pure_state_projects_close(
            a in prop::array::uniform6(-1.0..1.0f64),
            n in prop::array::uniform9(-1.0..1.0f64),
        ) {
            let va = v(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5]));
            prop_assume!(vnorm(&va) > 1e-2);
            let rho = density_matrix(&va).0;
            let raw_noise = CMat3::new(
                real(n[0]), c(n[1], n[2]), c(n[3], n[4]),
                c(n[1], -n[2]), real(n[5]), c(n[6], n[7]),
                c(n[3], -n[4]), c(n[6], -n[7]), real(n[8]),
            );
            let fro_n = crate::linalg::fro(&raw_noise);
            prop_assume!(fro_n > 1e-6);
            let noise = raw_noise * real(1e-3 / fro_n);
            let p = psd_project(&(rho + noise));
            prop_assert!(crate::linalg::fro(&(p.0 - rho)) < 2e-3);
            prop_assert!((p.0.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(hermiticity_defect(&p.0) < 1e-10);
            prop_assert!(crate::linalg::min_hermitian_eigenvalue(&p.0) > -1e-9);
        }
    }
}
