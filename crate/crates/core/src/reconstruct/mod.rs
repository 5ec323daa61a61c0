//! Eigenvalues from population ratios of eigenstates, and the generic
//! traceless-Hamiltonian fit from projected time-evolution data.

mod generic;
pub(crate) mod lm;

pub use generic::{fit_residual, generic_fit, simulate, GenericFit, GenericH, Measurement, FIT_SEEDS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, C64, I};
use crate::model::{poly_coeffs, ModelParams};
use crate::spectral::{eigenvalues_at, label_order};

pub const SOLVE_SEEDS: usize = 64;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Distinct fits closer than this in residual count as a tie.
const TIE: f64 = 1e-8;
/// Triples closer than this (as multisets) are the same solution.
const SAME: f64 = 1e-6;
const SUM_FLOOR: f64 = 1e-8;
/// The constraint and family relations hold exactly while ratios carry
/// noise; candidates are re-polished with these rows up-weighted.
const EXACT_WEIGHT: f64 = 100.0;
const POLISH_CANDIDATES: usize = 8;

/// The four measured ratios for eigenstates `which[0]` and `which[1]`
/// (band labels 1..=3 in descending-real-part order).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationRatios {
    pub which: [usize; 2],
    /// `P^a_2 / P^a_1` for each selected state.
    pub a: [f64; 2],
    /// `P^b_2 / P^b_1` for each selected state.
    pub b: [f64; 2],
}

fn ratio_a(w: C64) -> f64 {
    0.5 * w.norm_sqr()
}

fn ratio_b(w: C64) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((I + w * s) / (c(1.0, 0.0) + I * w * s)).norm_sqr()
}

/// Ratios from the exact labelled spectrum. `which = None` picks the two
/// eigenvalues with the largest `|c2 + E|`.
pub fn forward_ratios(p: &ModelParams, which: Option<[usize; 2]>) -> Result<PopulationRatios> {
    let ev = label_order(eigenvalues_at(p));
    let c2 = poly_coeffs(p).c2;
    let which = match which {
        Some(w) => {
            if w[0] == w[1] || !(1..=3).contains(&w[0]) || !(1..=3).contains(&w[1]) {
                return Err(Error::InvalidInput(format!("need two distinct bands in 1..=3, got {w:?}")));
            }
            w
        }
        None => {
            let mut idx = [0usize, 1, 2];
            idx.sort_by(|&i, &j| (c2 + ev[j]).norm().total_cmp(&(c2 + ev[i]).norm()));
            [idx[0] + 1, idx[1] + 1]
        }
    };
    let w = which.map(|i| c2 + ev[i - 1]);
    Ok(PopulationRatios { which, a: w.map(ratio_a), b: w.map(ratio_b) })
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    /// Band-labelled (descending real part) recovered eigenvalues.
    pub eigenvalues: [C64; 3],
    pub residual: f64,
    /// `|E1 E2 E3 - (sum E)(sum Ei Ej + 2)|` re-evaluated on the result.
    pub constraint_residual: f64,
}

fn unpack(x: &[f64]) -> [C64; 3] {
    [c(x[0], x[1]), c(x[2], x[3]), c(x[4], x[5])]
}

fn constraint(e: &[C64; 3]) -> C64 {
    let s = e[0] + e[1] + e[2];
    let s2 = e[0] * e[1] + e[1] * e[2] + e[0] * e[2];
    e[0] * e[1] * e[2] - s * (s2 + 2.0)
}

/// `Re c2` implied by `Im c1` minus the one recovered from `sum E`.
fn family_residual(e: &[C64; 3]) -> f64 {
    let s = e[0] + e[1] + e[2];
    let mut c1 = (-(e[0] * e[1] * e[2]) / s).sqrt();
    if c1.im < 0.0 {
        c1 = -c1;
    }
    let alpha = 2.0 * std::f64::consts::SQRT_2 * c1.im - 1.0;
    (-s).re - (1.0 - (alpha - 2.0).powi(2))
}

fn residuals(x: &[f64], m: &PopulationRatios, weight: f64) -> Vec<f64> {
    let e = unpack(x);
    let c2 = -(e[0] + e[1] + e[2]);
    let k = constraint(&e);
    let mut r = vec![weight * k.re, weight * k.im];
    for s in 0..2 {
        let w = c2 + e[s];
        r.push((ratio_a(w) - m.a[s]) / (1.0 + m.a[s]));
        r.push((ratio_b(w) - m.b[s]) / (1.0 + m.b[s]));
    }
    r.push(weight * family_residual(&e));
    r.into_iter().map(|v| if v.is_finite() { v } else { 1e6 }).collect()
}

/// `c2 + E` for a measured state, up to the sign of its real part: `a` fixes
/// `|w|` and `b` then fixes `Im w`.
fn w_from_ratios(a: f64, b: f64, positive: bool) -> C64 {
    let y = (b - 1.0) / (b + 1.0) * (a + 1.0) / std::f64::consts::SQRT_2;
    let x = (2.0 * a - y * y).max(0.0).sqrt();
    c(if positive { x } else { -x }, y)
}

/// Start point consistent with all four ratios for a trial `c2`.
fn seed_point(m: &PopulationRatios, c2: C64, signs: [bool; 2]) -> Vec<f64> {
    let w = [w_from_ratios(m.a[0], m.b[0], signs[0]), w_from_ratios(m.a[1], m.b[1], signs[1])];
    let e = [w[0] - c2, w[1] - c2, c2 - w[0] - w[1]];
    e.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Starts for every sign choice at the `c2` roots of the constraint, which is
/// quadratic in `c2` once both `w` are fixed.
fn algebraic_starts(m: &PopulationRatios) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for signs in [[true, true], [true, false], [false, true], [false, false]] {
        let at = |z: C64| {
            let x = seed_point(m, z, signs);
            constraint(&unpack(&x))
        };
        let (p0, p1, m1) = (at(c(0.0, 0.0)), at(c(1.0, 0.0)), at(c(-1.0, 0.0)));
        let qa = (p1 + m1) * 0.5 - p0;
        let qb = (p1 - m1) * 0.5;
        let roots = if qa.norm() > 1e-12 {
            let d = (qb * qb - qa * p0 * 4.0).sqrt();
            vec![(-qb + d) / (qa * 2.0), (-qb - d) / (qa * 2.0)]
        } else if qb.norm() > 1e-12 {
            vec![-p0 / qb]
        } else {
            Vec::new()
        };
        out.extend(roots.into_iter().filter(|z| z.is_finite()).map(|z| seed_point(m, z, signs)));
    }
    out
}

fn multiset_distance(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS
        .iter()
        .map(|p| (0..3).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

pub fn solve_eigenvalues(ratios: &PopulationRatios) -> Result<Reconstruction> {
    solve_eigenvalues_seeded(ratios, DEFAULT_SEED)
}

/// Multistart least squares from the algebraic starts plus [`SOLVE_SEEDS`]
/// complex Gaussian draws of `c2`, each completed to a start point that
/// satisfies the ratio equations.
pub fn solve_eigenvalues_seeded(ratios: &PopulationRatios, seed: u64) -> Result<Reconstruction> {
    let ok = |v: f64| v.is_finite() && v >= 0.0;
    if !ratios.a.iter().chain(&ratios.b).all(|&v| ok(v)) {
        return Err(Error::InvalidInput("ratios must be finite and nonnegative".into()));
    }
    // |c2 + E| = sqrt(2a) sets the spread of the spectrum
    let scale = 1.0 + (2.0 * ratios.a[0].max(ratios.a[1])).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.5 * scale).expect("positive sigma");
    let f = |x: &[f64]| residuals(x, ratios, 1.0);
    let opts = lm::LmOptions::default();
    let mut starts: Vec<([C64; 3], f64)> = Vec::new();
    let random = (0..SOLVE_SEEDS).map(|_| {
        let c2 = c(normal.sample(&mut rng), normal.sample(&mut rng));
        seed_point(ratios, c2, [rng.random(), rng.random()])
    });
    let seeds: Vec<Vec<f64>> = algebraic_starts(ratios).into_iter().chain(random).collect();
    for x0 in &seeds {
        let r = lm::minimize(&f, x0, &opts);
        if r.residual.is_finite() {
            starts.push((unpack(&r.x), r.residual));
        }
    }
    starts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut basins: Vec<[C64; 3]> = Vec::new();
    for (e, _) in &starts {
        if basins.len() == POLISH_CANDIDATES {
            break;
        }
        if basins.iter().all(|d| multiset_distance(d, e) > SAME) {
            basins.push(*e);
        }
    }
    let g = |x: &[f64]| residuals(x, ratios, EXACT_WEIGHT);
    let mut fits: Vec<([C64; 3], f64)> = basins
        .iter()
        .map(|e| {
            let x0: Vec<f64> = e.iter().flat_map(|z| [z.re, z.im]).collect();
            let r = lm::minimize(&g, &x0, &opts);
            (unpack(&r.x), r.residual)
        })
        .filter(|f| f.1.is_finite())
        .collect();
    fits.sort_by(|a, b| a.1.total_cmp(&b.1));
    let Some(&(best, best_res)) = fits.first() else {
        return Err(Error::InvalidInput("no seed produced a finite residual".into()));
    };
    let mut distinct: Vec<[C64; 3]> = vec![best];
    for (e, r) in &fits[1..] {
        if *r > best_res + TIE {
            break;
        }
        if distinct.iter().all(|d| multiset_distance(d, e) > SAME) {
            distinct.push(*e);
        }
    }
    if distinct.len() > 1 {
        return Err(Error::Ambiguous(distinct.into_iter().map(label_order).collect()));
    }
    if (best[0] + best[1] + best[2]).norm() < SUM_FLOOR {
        return Err(Error::Degenerate);
    }
    Ok(Reconstruction {
        eigenvalues: label_order(best),
        residual: best_res,
        constraint_residual: constraint(&best).norm(),
    })
}

/// Monte Carlo spread of reconstructions under multiplicative Gaussian
/// ratio noise.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseStudy {
    pub trials: usize,
    pub failures: usize,
    /// Fraction of trials with every eigenvalue within `tolerance` of truth.
    pub within: f64,
    pub tolerance: f64,
    pub mean: [C64; 3],
    /// Componentwise standard deviations `(std Re, std Im)`.
    pub std: [(f64, f64); 3],
}

pub fn noise_study(
    truth: &PopulationRatios,
    exact: &[C64; 3],
    sigma: f64,
    trials: usize,
    tolerance: f64,
    seed: u64,
) -> Result<NoiseStudy> {
    if !(sigma >= 0.0 && sigma.is_finite()) || trials == 0 {
        return Err(Error::InvalidInput("need sigma >= 0 and trials >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut sols = Vec::with_capacity(trials);
    let mut failures = 0;
    let mut good = 0;
    for _ in 0..trials {
        let mut noisy = *truth;
        for v in noisy.a.iter_mut().chain(noisy.b.iter_mut()) {
            *v = (*v * (1.0 + sigma * normal.sample(&mut rng))).max(0.0);
        }
        match solve_eigenvalues_seeded(&noisy, rng.random()) {
            Ok(r) => {
                if (0..3).all(|i| (r.eigenvalues[i] - exact[i]).norm() <= tolerance) {
                    good += 1;
                }
                sols.push(r.eigenvalues);
            }
            Err(_) => failures += 1,
        }
    }
    let n = sols.len().max(1) as f64;
    let mut mean = [C64::new(0.0, 0.0); 3];
    for s in &sols {
        for i in 0..3 {
            mean[i] += s[i] / n;
        }
    }
    let mut std = [(0.0, 0.0); 3];
    for s in &sols {
        for i in 0..3 {
            let d = s[i] - mean[i];
            std[i].0 += d.re * d.re / n;
            std[i].1 += d.im * d.im / n;
        }
    }
    let std = std.map(|(a, b)| (a.sqrt(), b.sqrt()));
    Ok(NoiseStudy { trials, failures, within: good as f64 / trials as f64, tolerance, mean, std })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat3;
    use crate::model::{loop_point, Loop};
    use crate::spectral::family_eigenvector;
    use std::f64::consts::PI;

    fn gamma(alpha: f64, theta: f64) -> ModelParams {
        loop_point(&Loop::centered(alpha, 1.4).unwrap(), theta)
    }

    /// Populations after `U_a = U2 U1` and `U_b = U3 U2 U1` on the eigenvector.
    fn matrix_ratios(c1: C64, c2: C64, e: C64) -> (f64, f64) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let u1 = CMat3::new(z, -I, z, -I, z, z, z, z, o);
        let u2 = CMat3::new(o, z, z, z, c(s, 0.0), c(0.0, -s), z, c(0.0, -s), c(s, 0.0));
        let u3 = CMat3::new(c(s, 0.0), c(0.0, -s), z, c(0.0, -s), c(s, 0.0), z, z, z, o);
        let psi = family_eigenvector(c1, c2, e);
        let va = u2 * u1 * psi;
        let vb = u3 * va;
        (va[1].norm_sqr() / va[0].norm_sqr(), vb[1].norm_sqr() / vb[0].norm_sqr())
    }

    #[test]
    fn closed_form_matches_unitaries() {
        for (alpha, theta) in [(0.39, 11.0 * PI / 8.0), (1.0, 0.3), (2.5, 4.0)] {
            let p = gamma(alpha, theta);
            let pc = poly_coeffs(&p);
            let r = forward_ratios(&p, Some([1, 3])).unwrap();
            let ev = label_order(eigenvalues_at(&p));
            for (s, band) in [1usize, 3].iter().enumerate() {
                let (a, b) = matrix_ratios(pc.c1, pc.c2, ev[band - 1]);
                assert!((a - r.a[s]).abs() < 1e-10 * (1.0 + a), "{a} {}", r.a[s]);
                assert!((b - r.b[s]).abs() < 1e-10 * (1.0 + b), "{b} {}", r.b[s]);
            }
        }
    }

    #[test]
    fn zero_first_ratio() {
        assert_eq!(ratio_a(c(0.0, 0.0)), 0.0);
        assert!((ratio_b(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ratios_fix_imaginary_part_of_w() {
        // |w|^2 = 2a and (b - 1)/(b + 1) = sqrt2 Im w / (|w|^2/2 + 1)
        let p = gamma(0.39, 13.0 * PI / 8.0);
        let r = forward_ratios(&p, None).unwrap();
        let c2 = poly_coeffs(&p).c2;
        let ev = label_order(eigenvalues_at(&p));
        for s in 0..2 {
            let w = c2 + ev[r.which[s] - 1];
            let y = (r.b[s] - 1.0) / (r.b[s] + 1.0) * (r.a[s] + 1.0) / std::f64::consts::SQRT_2;
            assert!((w.norm_sqr() - 2.0 * r.a[s]).abs() < 1e-12);
            assert!((w.im - y).abs() < 1e-12);
        }
    }

    #[test]
    fn default_choice_is_best_conditioned() {
        let p = gamma(0.39, 11.0 * PI / 8.0);
        let r = forward_ratios(&p, None).unwrap();
        let c2 = poly_coeffs(&p).c2;
        let ev = label_order(eigenvalues_at(&p));
        let other = 6 - r.which[0] - r.which[1];
        assert!((c2 + ev[other - 1]).norm() <= (c2 + ev[r.which[1] - 1]).norm());
        assert!(forward_ratios(&p, Some([2, 2])).is_err());
    }

    #[test]
    fn reference_goldens_round_trip() {
        let goldens = [
            (11.0 * PI / 8.0, [c(2.3, -0.9), c(0.5, 0.2), c(-1.2, -0.6)]),
            (13.0 * PI / 8.0, [c(2.4, -1.0), c(0.2, -0.6), c(-1.0, 0.3)]),
        ];
        for (theta, golden) in goldens {
            let p = gamma(0.39, theta);
            let exact = label_order(eigenvalues_at(&p));
            let rec = solve_eigenvalues(&forward_ratios(&p, None).unwrap()).unwrap();
            for i in 0..3 {
                assert!((rec.eigenvalues[i] - exact[i]).norm() < 1e-6);
                assert!((rec.eigenvalues[i].re - golden[i].re).abs() < 0.05);
                assert!((rec.eigenvalues[i].im - golden[i].im).abs() < 0.05);
            }
            assert!(rec.constraint_residual < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_ratios() {
        let r = PopulationRatios { which: [1, 2], a: [f64::NAN, 1.0], b: [1.0, 1.0] };
        assert!(solve_eigenvalues(&r).is_err());
    }

    #[test]
    fn shift_enters_only_through_c2_plus_e() {
        // rebuilding c2 from the triple reproduces the same ratios
        let p = gamma(1.2, 2.0);
        let ev = label_order(eigenvalues_at(&p));
        let c2 = -(ev[0] + ev[1] + ev[2]);
        let r = forward_ratios(&p, Some([1, 2])).unwrap();
        assert!((ratio_a(c2 + ev[0]) - r.a[0]).abs() < 1e-12);
        assert!((ratio_b(c2 + ev[1]) - r.b[1]).abs() < 1e-12);
    }
}
