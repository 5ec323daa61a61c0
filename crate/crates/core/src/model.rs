//! The three-band Hamiltonian family `H_alpha(k1, k2)`, its characteristic
//! polynomial and the closed-form discriminant.

use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c, real, CMat3, C64};

/// A point `(alpha, k1, k2)` of parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, k1: f64, k2: f64) -> Result<Self> {
        if !(alpha.is_finite() && k1.is_finite() && k2.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite parameters ({alpha}, {k1}, {k2})"
            )));
        }
        Ok(Self { alpha, k1, k2 })
    }

    pub fn with_k(self, k1: f64, k2: f64) -> Self {
        Self { k1, k2, ..self }
    }
}

/// Coefficients of `P(E) = E^3 + c2 E^2 + (-c1^2 - 2) E - c1^2 c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub c1: C64,
    pub c2: C64,
}

impl PolyCoeffs {
    pub fn c1_sq(&self) -> C64 {
        self.c1 * self.c1
    }

    /// Monic coefficients `[a, b, c]` of `E^3 + a E^2 + b E + c`.
    pub fn monic(&self) -> [C64; 3] {
        let q = self.c1_sq();
        [self.c2, -q - 2.0, -q * self.c2]
    }

    pub fn eval(&self, e: C64) -> C64 {
        let [a, b, cc] = self.monic();
        ((e + a) * e + b) * e + cc
    }

    pub fn discriminant(&self) -> C64 {
        discriminant_qc(self.c1_sq(), self.c2)
    }
}

/// Counter-clockwise circle in the `(k1, k2)` plane at fixed `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub alpha: f64,
    pub radius: f64,
    pub center: (f64, f64),
}

impl Loop {
    pub fn new(alpha: f64, radius: f64, center: (f64, f64)) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("loop radius must be > 0, got {radius}")));
        }
        if !(alpha.is_finite() && center.0.is_finite() && center.1.is_finite()) {
            return Err(Error::InvalidInput("non-finite loop parameters".into()));
        }
        Ok(Self { alpha, radius, center })
    }

    /// The reference loop `Gamma`: centered at the origin.
    pub fn centered(alpha: f64, radius: f64) -> Result<Self> {
        Self::new(alpha, radius, (0.0, 0.0))
    }

    /// `n` equally spaced angles in `[0, 2pi)`.
    pub fn uniform_samples(n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| std::f64::consts::TAU * j as f64 / n as f64)
            .collect()
    }
}

pub fn poly_coeffs(p: &ModelParams) -> PolyCoeffs {
    let c1 = c(0.0, (p.alpha + 1.0) / 4.0) - p.k1;
    let c1 = c1 * SQRT_2;
    let c2 = c(1.0 - (p.alpha - 2.0).powi(2), -p.k2);
    PolyCoeffs { c1, c2 }
}

/// `[[c1, -1, 0], [-1, -c2, -1], [0, -1, -c1]]`, written entrywise so the
/// off-diagonal `-1` is exact.
pub fn hamiltonian(p: &ModelParams) -> CMat3 {
    let PolyCoeffs { c1, c2 } = poly_coeffs(p);
    let m1 = real(-1.0);
    let z = real(0.0);
    CMat3::new(c1, m1, z, m1, -c2, m1, z, m1, -c1)
}

/// Discriminant of the cubic written in `q = c1^2` and `c2`.
pub(crate) fn discriminant_qc(q: C64, c2: C64) -> C64 {
    let s = q + 2.0;
    let c2sq = c2 * c2;
    c2sq * s * s + 4.0 * s * s * s + 4.0 * c2sq * c2sq * q - 27.0 * q * q * c2sq
        + 18.0 * c2sq * q * s
}

/// Partial derivatives `(dDisc/dq, dDisc/dc2)`.
pub(crate) fn discriminant_qc_grad(q: C64, c2: C64) -> (C64, C64) {
    let s = q + 2.0;
    let c2sq = c2 * c2;
    let dq = 2.0 * c2sq * s + 12.0 * s * s + 4.0 * c2sq * c2sq - 54.0 * q * c2sq
        + 18.0 * c2sq * (2.0 * q + 2.0);
    let dc2 = 2.0 * c2 * s * s + 16.0 * c2sq * c2 * q - 54.0 * q * q * c2 + 36.0 * c2 * q * s;
    (dq, dc2)
}

pub fn discriminant(p: &ModelParams) -> C64 {
    poly_coeffs(p).discriminant()
}

/// Complex derivatives of the discriminant along `k1`, `k2` and `alpha`.
pub fn discriminant_gradient(p: &ModelParams) -> [C64; 3] {
    let pc = poly_coeffs(p);
    let q = pc.c1_sq();
    let (dq, dc2) = discriminant_qc_grad(q, pc.c2);
    // dq/dk1 = 2 c1 * (-sqrt2); dq/dalpha = 2 c1 * (i sqrt2 / 4)
    let d_k1 = dq * pc.c1 * (-2.0 * SQRT_2);
    let d_k2 = dc2 * c(0.0, -1.0);
    let d_alpha = dq * pc.c1 * c(0.0, 2.0 * SQRT_2 / 4.0) + dc2 * real(-2.0 * (p.alpha - 2.0));
    [d_k1, d_k2, d_alpha]
}

pub fn loop_point(lp: &Loop, theta: f64) -> ModelParams {
    ModelParams {
        alpha: lp.alpha,
        k1: lp.center.0 + lp.radius * theta.cos(),
        k2: lp.center.1 + lp.radius * theta.sin(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spin1_x, spin1_z, I};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn p(alpha: f64, k1: f64, k2: f64) -> ModelParams {
        ModelParams::new(alpha, k1, k2).unwrap()
    }

    #[test]
    fn ep3_point_has_cubic_e3() {
        let pc = poly_coeffs(&p(3.0, 0.0, 0.0));
        assert!((pc.c1_sq() - real(-2.0)).norm() < 1e-15);
        assert!(pc.c2.norm() < 1e-15);
        let [a, b, cc] = pc.monic();
        assert!(a.norm() < 1e-15 && b.norm() < 1e-14 && cc.norm() < 1e-15);
        assert!(discriminant(&p(3.0, 0.0, 0.0)).norm() < 1e-30);

        let h = hamiltonian(&p(3.0, 0.0, 0.0));
        assert!(h[(1, 1)].norm() < 1e-15);
        assert!((h[(0, 1)] - real(-1.0)).norm() < 1e-15);
        assert!((h[(1, 2)] - real(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn matches_spin_one_form() {
        for q in [p(0.39, 0.7, -0.2), p(3.0, 0.0, 0.0), p(-0.4, 1.1, 2.0)] {
            let coef = (c(0.0, (q.alpha + 1.0) / 4.0) - q.k1) * SQRT_2;
            let mut want = spin1_z() * coef - spin1_x() * real(SQRT_2);
            want[(1, 1)] += I * q.k2 - (1.0 - (q.alpha - 2.0).powi(2));
            assert!(crate::linalg::max_abs(&(hamiltonian(&q) - want)) < 1e-14);
        }
    }

    #[test]
    fn trace_identity() {
        let h = hamiltonian(&p(0.0, 0.0, 0.0));
        assert!((h.trace() - real(3.0)).norm() < 1e-14);
        let q = p(1.3, -0.4, 0.8);
        assert!((hamiltonian(&q).trace() + poly_coeffs(&q).c2).norm() < 1e-14);
    }

    #[test]
    fn non_hermitian_off_minus_one() {
        let h = hamiltonian(&p(0.5, 0.2, 0.1));
        assert!(crate::linalg::hermiticity_defect(&h) > 0.1);
        let h = hamiltonian(&p(-1.0, 0.2, 0.0));
        assert!(crate::linalg::hermiticity_defect(&h) < 1e-15);
    }

    #[test]
    fn coefficient_goldens() {
        let pc = poly_coeffs(&p(0.39, 0.0, 0.0));
        assert!((pc.c1_sq() - real(-0.2415125)).norm() < 1e-9);
        assert!((pc.c2 - real(-1.5921)).norm() < 1e-12);

        let pc = poly_coeffs(&p(1.0, 0.46, -1.06));
        assert!((pc.c1 - c(-0.46, 0.5) * SQRT_2).norm() < 1e-14);
        assert!((pc.c2 - c(0.0, 1.06)).norm() < 1e-14);
    }

    #[test]
    fn discriminant_near_creation_point() {
        assert!(discriminant(&p(0.39, 0.0, 0.0)).norm() < 0.05);
        assert!(discriminant(&p(0.0, 0.0, 0.0)).norm() > 1.0);
    }

    #[test]
    fn characteristic_polynomial_matches_matrix() {
        let q = p(1.7, 0.3, -0.9);
        let h = hamiltonian(&q);
        let pc = poly_coeffs(&q);
        for e in [c(0.3, 0.1), c(-1.0, 2.0), c(2.5, -0.7)] {
            let det = (CMat3::identity() * e - h).determinant();
            assert!((det - pc.eval(e)).norm() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let q = p(1.2, 0.37, -0.55);
        let g = discriminant_gradient(&q);
        let h = 1e-6;
        let fd = |dq: ModelParams| (discriminant(&dq) - discriminant(&q)) / h;
        let k1 = fd(p(q.alpha, q.k1 + h, q.k2));
        let k2 = fd(p(q.alpha, q.k1, q.k2 + h));
        let al = fd(p(q.alpha + h, q.k1, q.k2));
        assert!((k1 - g[0]).norm() < 1e-4 * (1.0 + g[0].norm()));
        assert!((k2 - g[1]).norm() < 1e-4 * (1.0 + g[1].norm()));
        assert!((al - g[2]).norm() < 1e-4 * (1.0 + g[2].norm()));
    }

    #[test]
    fn loop_points() {
        let lp = Loop::centered(0.39, 1.4).unwrap();
        let a = loop_point(&lp, 0.0);
        assert!((a.k1 - 1.4).abs() < 1e-15 && a.k2.abs() < 1e-15);
        let b = loop_point(&lp, FRAC_PI_2);
        assert!(b.k1.abs() < 1e-15 && (b.k2 - 1.4).abs() < 1e-15);
        let lp = Loop::new(1.0, 0.5, (0.46, -1.06)).unwrap();
        let d = loop_point(&lp, PI);
        assert!((d.k1 + 0.04).abs() < 1e-12 && (d.k2 + 1.06).abs() < 1e-12);
        assert!(Loop::centered(1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ModelParams::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, f64::INFINITY, 0.0).is_err());
    }
}
