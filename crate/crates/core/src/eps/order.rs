use serde::Serialize;

use super::{disc_at, find_eps, newton_zero, DegeneratePair, Rect, ZERO_RESIDUAL};
use crate::error::{Error, Result};
use crate::evolution::{density_matrix, fidelity};
use crate::linalg::C64;
use crate::model::{poly_coeffs, ModelParams};
use crate::spectral::{eigenvalues_at, family_eigenvector, label_order, Cubic};

/// Points off the zero set by more than `|disc| = 1e-8` are moved to the
/// nearest zero, provided it lies within this distance.
pub const SNAP_RADIUS: f64 = 0.05;

const AT_EP: f64 = 1e-8;
const SNAP_GRID: usize = 8;
const CLUSTER_TOL: f64 = 1e-6;
const CANDIDATE_TOL: f64 = 1e-3;
const COALESCED: f64 = 0.999;

#[derive(Debug, Clone, Serialize)]
pub struct EpOrder {
    pub order: u8,
    pub degenerate_pair: DegeneratePair,
    /// `fidelity[i][j]` between eigenstates of bands `i + 1` and `j + 1`.
    pub fidelity: [[f64; 3]; 3],
    /// Band-labelled eigenvalues after cluster polishing.
    pub eigenvalues: [C64; 3],
    pub point: (f64, f64),
    pub residual: f64,
}

fn quadratic_roots(a: C64, b: C64, c: C64) -> [C64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
    if q.norm() == 0.0 {
        return [C64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// Replaces each candidate cluster of size `k` by the root of `P^(k-1)`
/// nearest its centroid, when `P` and its lower derivatives vanish there.
fn polish_clusters(cubic: &Cubic, ev: [C64; 3]) -> [C64; 3] {
    let mut out = ev;
    let close = |i: usize, j: usize| (ev[i] - ev[j]).norm() < CANDIDATE_TOL;
    let scale = 1.0 + ev.iter().map(|e| e.norm()).fold(0.0, f64::max);
    if close(0, 1) && close(1, 2) && close(0, 2) {
        let c = -cubic.a / 3.0;
        if cubic.eval(c).norm() <= 1e-12 * scale.powi(3) && cubic.derivative(c).norm() <= 1e-12 * scale.powi(2) {
            return [c; 3];
        }
    }
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        if !close(i, j) {
            continue;
        }
        let centroid = (ev[i] + ev[j]) * 0.5;
        let [r1, r2] = quadratic_roots(C64::new(3.0, 0.0), cubic.a * 2.0, cubic.b);
        let c = if (r1 - centroid).norm() <= (r2 - centroid).norm() { r1 } else { r2 };
        if cubic.eval(c).norm() <= 1e-12 * scale.powi(3) {
            out[i] = c;
            out[j] = c;
        }
    }
    out
}

/// Order of the exceptional point at `(alpha, point)` from eigenvalue
/// clusters whose eigenvectors have coalesced.
pub fn ep_order(alpha: f64, point: (f64, f64)) -> Result<EpOrder> {
    let mut k = point;
    let mut residual = disc_at(alpha, k).norm();
    if residual > AT_EP {
        // Newton alone can stall on the saddle between a freshly created pair
        let region = Rect::square(point, SNAP_RADIUS)?;
        let mut cands: Vec<((f64, f64), f64)> =
            find_eps(alpha, &region, SNAP_GRID)?.into_iter().map(|e| (e.position, e.residual)).collect();
        cands.push(newton_zero(alpha, point));
        let dist = |z: (f64, f64)| (z.0 - point.0).hypot(z.1 - point.1);
        let (z, r) = cands
            .into_iter()
            .filter(|&(z, r)| r <= ZERO_RESIDUAL && dist(z) <= SNAP_RADIUS)
            .min_by(|a, b| dist(a.0).total_cmp(&dist(b.0)))
            .ok_or(Error::NotAnEp)?;
        k = z;
        residual = r;
    }
    let p = ModelParams::new(alpha, k.0, k.1)?;
    let pc = poly_coeffs(&p);
    let [a, b, c] = pc.monic();
    let cubic = Cubic::new(a, b, c);
    let ev = polish_clusters(&cubic, label_order(eigenvalues_at(&p)));
    let vecs = ev.map(|e| family_eigenvector(pc.c1, pc.c2, e));
    let rho = vecs.map(|v| density_matrix(&v));
    let mut f = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            f[i][j] = if i == j { 1.0 } else { fidelity(&rho[i], &rho[j]) };
        }
    }
    let tied = |i: usize, j: usize| (ev[i] - ev[j]).norm() < CLUSTER_TOL && f[i][j] > COALESCED;
    let (order, pair) = if tied(0, 1) && tied(1, 2) && tied(0, 2) {
        (3, DegeneratePair::All)
    } else if let Some(&(i, j)) = [(0, 1), (1, 2), (0, 2)].iter().find(|&&(i, j)| tied(i, j)) {
        (2, DegeneratePair::Pair(i + 1, j + 1))
    } else {
        return Err(Error::NotAnEp);
    };
    Ok(EpOrder { order, degenerate_pair: pair, fidelity: f, eigenvalues: ev, point: k, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn creation_point_is_ep2() {
        let o = ep_order(0.39, (0.0, 0.0)).unwrap();
        assert_eq!(o.order, 2);
        assert_eq!(o.degenerate_pair, DegeneratePair::Pair(2, 3));
        assert!(o.fidelity[1][2] > 0.999);
        assert!(o.fidelity[0][1] < 0.2 && o.fidelity[0][2] < 0.2);
    }

    #[test]
    fn reference_alpha1_points() {
        for k in [(0.46, -1.06), (-0.46, 1.06)] {
            let o = ep_order(1.0, k).unwrap();
            assert_eq!(o.order, 2);
            assert_eq!(o.degenerate_pair, DegeneratePair::Pair(2, 3));
        }
    }

    #[test]
    fn ep3_order_three() {
        let o = ep_order(3.0, (0.0, 0.0)).unwrap();
        assert_eq!(o.order, 3);
        assert_eq!(o.degenerate_pair, DegeneratePair::All);
        assert!(o.fidelity.iter().flatten().all(|&x| x > 0.999));
        assert!(o.eigenvalues.iter().all(|e| e.norm() < 1e-5));
    }

    #[test]
    fn generic_point_is_not_an_ep() {
        assert!(matches!(ep_order(1.0, (1.5, 1.5)), Err(Error::NotAnEp)));
    }

    #[test]
    fn quadratic_oracle() {
        let [r1, r2] = quadratic_roots(C64::new(1.0, 0.0), C64::new(-3.0, 0.0), C64::new(2.0, 0.0));
        let mut r = [r1.re, r2.re];
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0).abs() < 1e-14 && (r[1] - 2.0).abs() < 1e-14);
    }
}
