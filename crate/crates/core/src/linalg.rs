//! Small dense complex linear algebra on 3x3 (and 6x6) matrices.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat3 = Matrix3<C64>;
pub type CVec3 = Vector3<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn dagger(m: &CMat3) -> CMat3 {
    m.adjoint()
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMat3) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs(m: &CMat3) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm.
pub fn fro(m: &CMat3) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vnorm(v: &CVec3) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(v: &CVec3) -> CVec3 {
    let n = vnorm(v);
    v.map(|z| z / n)
}

/// `<a|b>` with the first argument conjugated.
pub fn inner(a: &CVec3, b: &CVec3) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `1 - |<a|b>| / (|a| |b|)`: zero iff the rays coincide.
pub fn ray_mismatch(a: &CVec3, b: &CVec3) -> f64 {
    let na = vnorm(a);
    let nb = vnorm(b);
    (1.0 - inner(a, b).norm() / (na * nb)).max(0.0)
}

/// Sine of the angle between two rays, from the orthogonal residual so that
/// small angles keep full precision.
pub fn ray_sine(a: &CVec3, b: &CVec3) -> f64 {
    let ua = normalized(a);
    let ub = normalized(b);
    vnorm(&(ub - ua * inner(&ua, &ub))).min(1.0)
}

pub fn expm(m: &CMat3) -> CMat3 {
    m.exp()
}

/// Eigen-decomposition of a Hermitian matrix; the input is symmetrized first.
pub fn hermitian_eigen(m: &CMat3) -> (Vector3<f64>, CMat3) {
    let h = (m + m.adjoint()) * real(0.5);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues, eig.eigenvectors)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMat3, f: impl Fn(f64) -> f64) -> CMat3 {
    let (vals, vecs) = hermitian_eigen(m);
    let d = CMat3::from_diagonal(&vals.map(|x| real(f(x))));
    vecs * d * vecs.adjoint()
}

/// Principal square root of a positive semi-definite Hermitian matrix.
/// Eigenvalues below `1e-14` of the largest are round-off and are zeroed.
pub fn hermitian_sqrt(m: &CMat3) -> CMat3 {
    let (vals, vecs) = hermitian_eigen(m);
    let cut = 1e-14 * vals.amax();
    let d = CMat3::from_diagonal(&vals.map(|x| real(if x > cut { x.sqrt() } else { 0.0 })));
    vecs * d * vecs.adjoint()
}

pub fn min_hermitian_eigenvalue(m: &CMat3) -> f64 {
    hermitian_eigen(m).0.min()
}

/// Solves `X A + A X = B` for Hermitian positive-definite `A`.
pub fn solve_symmetric_sylvester(a: &CMat3, b: &CMat3) -> CMat3 {
    let (vals, vecs) = hermitian_eigen(a);
    let bt = vecs.adjoint() * b * vecs;
    let xt = CMat3::from_fn(|i, j| bt[(i, j)] / (vals[i] + vals[j]));
    vecs * xt * vecs.adjoint()
}

/// Right singular vector for the smallest singular value.
pub fn null_vector(m: &CMat3) -> CVec3 {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let row = v_t.row(idx);
    normalized(&CVec3::new(row[0].conj(), row[1].conj(), row[2].conj()))
}

pub fn min_singular_value(m: &CMat3) -> f64 {
    m.singular_values().min()
}

/// Spin-1 `S_x`.
pub fn spin1_x() -> CMat3 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat3::new(
        real(0.0), real(s), real(0.0),
        real(s), real(0.0), real(s),
        real(0.0), real(s), real(0.0),
    )
}

/// Spin-1 `S_z`.
pub fn spin1_z() -> CMat3 {
    CMat3::from_diagonal(&CVec3::new(real(1.0), real(0.0), real(-1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_hpd() -> CMat3 {
        let a = CMat3::new(
            c(1.0, 0.2), c(0.3, -0.1), c(0.0, 0.5),
            c(-0.2, 0.0), c(0.7, 0.3), c(0.1, 0.1),
            c(0.4, -0.3), c(0.0, 0.2), c(1.1, 0.0),
        );
        a.adjoint() * a + CMat3::identity() * real(0.1)
    }

    #[test]
    fn sqrt_squares_back() {
        let m = sample_hpd();
        let r = hermitian_sqrt(&m);
        assert!(max_abs(&(r * r - m)) < 1e-12);
        assert!(hermiticity_defect(&r) < 1e-13);
    }

    #[test]
    fn sylvester_residual() {
        let a = sample_hpd();
        let b = CMat3::new(
            c(0.3, 0.0), c(0.1, 0.2), c(-0.4, 0.0),
            c(0.1, -0.2), c(-0.5, 0.0), c(0.0, 0.3),
            c(-0.4, 0.0), c(0.0, -0.3), c(0.9, 0.0),
        );
        let x = solve_symmetric_sylvester(&a, &b);
        assert!(max_abs(&(x * a + a * x - b)) < 1e-12);
    }

    #[test]
    fn null_vector_of_singular_matrix() {
        let v = CVec3::new(c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0));
        let w = CVec3::new(c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        // rank-2 matrix annihilating n
        let n = v.cross(&w);
        let m = CMat3::from_rows(&[v.transpose(), w.transpose(), (v * c(0.0, 2.0)).transpose()]);
        let nv = null_vector(&m);
        assert!(vnorm(&(m * nv)) < 1e-12);
        assert!(ray_mismatch(&nv, &n) < 1e-12);
    }

    #[test]
    fn expm_of_diagonal() {
        let d = CMat3::from_diagonal(&CVec3::new(c(0.0, -1.0), c(0.5, 0.0), c(0.0, 2.0)));
        let e = expm(&d);
        assert!((e[(0, 0)] - c(0.0, -1.0).exp()).norm() < 1e-13);
        assert!((e[(2, 2)] - c(0.0, 2.0).exp()).norm() < 1e-13);
        assert!(e[(0, 1)].norm() < 1e-15);
    }
}
