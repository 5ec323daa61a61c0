//! Eigenvalues of the family, band continuation along loops, relative phases
//! and real-part crossings.

pub mod cubic;
mod phases;
mod tracking;

pub use cubic::Cubic;
pub use phases::{detect_crossings, relative_phases, CrossingEvent, PhaseSeries, PAIRS};
pub use tracking::{closure_permutation, match_bands, track_bands, BandPath, EP_ON_LOOP_THRESHOLD};

use crate::linalg::{c, fro, normalized, null_vector, vnorm, CMat3, CVec3, C64};
use crate::model::{poly_coeffs, ModelParams};

/// Eigenvalues ordered by `(Re, Im)` ascending, with optional unit right
/// eigenvectors in the same order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: [C64; 3],
    pub eigenvectors: Option<[CVec3; 3]>,
}

/// Characteristic polynomial `det(E - H)` of an arbitrary 3x3 matrix.
pub fn char_poly(h: &CMat3) -> Cubic {
    let tr = h.trace();
    let minors = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]
        + h[(0, 0)] * h[(2, 2)] - h[(0, 2)] * h[(2, 0)]
        + h[(1, 1)] * h[(2, 2)] - h[(1, 2)] * h[(2, 1)];
    Cubic::new(-tr, minors, -h.determinant())
}

/// Family matrices have the tridiagonal `-1` pattern and `H[2][2] = -H[0][0]`.
fn family_coeffs(h: &CMat3) -> Option<(C64, C64)> {
    let m1 = c(-1.0, 0.0);
    let tol = 1e-14 * (1.0 + fro(h));
    let ok = (h[(0, 1)] - m1).norm() <= tol
        && (h[(1, 0)] - m1).norm() <= tol
        && (h[(1, 2)] - m1).norm() <= tol
        && (h[(2, 1)] - m1).norm() <= tol
        && h[(0, 2)].norm() <= tol
        && h[(2, 0)].norm() <= tol
        && (h[(2, 2)] + h[(0, 0)]).norm() <= tol;
    ok.then(|| (h[(0, 0)], -h[(1, 1)]))
}

/// Right eigenvector `(-1 + (c1+E)(c2+E), -(c1+E), 1)`, normalized.
pub fn family_eigenvector(c1: C64, c2: C64, e: C64) -> CVec3 {
    let u = c1 + e;
    normalized(&CVec3::new(u * (c2 + e) - 1.0, -u, c(1.0, 0.0)))
}

fn eigenvector(h: &CMat3, e: C64, fam: Option<(C64, C64)>) -> CVec3 {
    let shifted = h - CMat3::identity() * e;
    if let Some((c1, c2)) = fam {
        let v = family_eigenvector(c1, c2, e);
        if vnorm(&(shifted * v)) <= 1e-8 * fro(h).max(1.0) {
            return v;
        }
    }
    null_vector(&shifted)
}

pub fn eigensolve(h: &CMat3, want_vectors: bool) -> Spectrum {
    let mut ev = char_poly(h).roots();
    cubic::sort_lex(&mut ev);
    let eigenvectors = want_vectors.then(|| {
        let fam = family_coeffs(h);
        [
            eigenvector(h, ev[0], fam),
            eigenvector(h, ev[1], fam),
            eigenvector(h, ev[2], fam),
        ]
    });
    Spectrum { eigenvalues: ev, eigenvectors }
}

/// Eigenvalues at a parameter point straight from the polynomial coefficients,
/// ordered by `(Re, Im)`.
pub fn eigenvalues_at(p: &ModelParams) -> [C64; 3] {
    let [a, b, cc] = poly_coeffs(p).monic();
    let mut ev = Cubic::new(a, b, cc).roots();
    cubic::sort_lex(&mut ev);
    ev
}

/// Reorders a spectrum so that index 0 holds band 1 (largest real part),
/// ties broken by larger imaginary part.
pub fn label_order(ev: [C64; 3]) -> [C64; 3] {
    let mut v = ev;
    v.sort_by(|x, y| {
        if (x.re - y.re).abs() > 1e-9 {
            y.re.total_cmp(&x.re)
        } else {
            y.im.total_cmp(&x.im)
        }
    });
    v
}

/// Minimum pairwise distance.
pub fn min_gap(ev: &[C64; 3]) -> f64 {
    (ev[0] - ev[1]).norm().min((ev[1] - ev[2]).norm()).min((ev[0] - ev[2]).norm())
}
