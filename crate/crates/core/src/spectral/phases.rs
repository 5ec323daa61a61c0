use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use super::tracking::{match_bands, wrap_pi, BandPath};
use super::eigenvalues_at;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::loop_point;

/// Band index pairs of the three phase series `phi_12, phi_23, phi_31`.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

const DEGENERATE_GAP: f64 = 1e-10;
const BISECT_WIDTH: f64 = 1e-12;
const TANGENT_SLOPE: f64 = 1e-8;

/// Unwrapped `phi_ij(theta) = -arg(E_i - E_j)` for the pairs in [`PAIRS`].
#[derive(Debug, Clone, Serialize)]
pub struct PhaseSeries {
    pub path: BandPath,
    pub phi: [Vec<f64>; 3],
}

impl PhaseSeries {
    /// Series for any ordered pair of distinct 0-based bands.
    pub fn series(&self, i: usize, j: usize) -> Vec<f64> {
        for (k, &(a, b)) in PAIRS.iter().enumerate() {
            if (a, b) == (i, j) {
                return self.phi[k].clone();
            }
            if (b, a) == (i, j) {
                return self.phi[k].iter().map(|x| x + PI).collect();
            }
        }
        panic!("invalid band pair ({i}, {j})");
    }
}

/// A real-part crossing `tau_ij`: at `theta`, `Re E_i = Re E_j` and
/// `Im E_i < Im E_j`. Labels are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub theta: f64,
    pub i: usize,
    pub j: usize,
}

impl CrossingEvent {
    pub fn label(&self) -> String {
        format!("t{}{}", self.i, self.j)
    }
}

pub fn relative_phases(path: &BandPath) -> Result<PhaseSeries> {
    let mut phi: [Vec<f64>; 3] = Default::default();
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let mut out = Vec::with_capacity(path.len());
        for (a, b) in path.bands[i].iter().zip(path.bands[j].iter()) {
            let d = a - b;
            if d.norm() < DEGENERATE_GAP {
                return Err(Error::DegenerateBands(i + 1, j + 1));
            }
            let raw = -d.arg();
            let v = match out.last() {
                None => raw,
                Some(&prev) => prev + wrap_pi(raw - prev),
            };
            out.push(v);
        }
        phi[k] = out;
    }
    Ok(PhaseSeries { path: path.clone(), phi })
}

/// Emits `tau_ij` whenever `phi_ij` crosses `+pi/2` (mod 2pi) and `tau_ji`
/// at `-pi/2`, sorted by angle.
pub fn detect_crossings(series: &PhaseSeries) -> Result<Vec<CrossingEvent>> {
    let path = &series.path;
    let mut events = Vec::new();
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let phi = &series.phi[k];
        for s in 0..phi.len().saturating_sub(1) {
            let (lo, hi) = (phi[s].min(phi[s + 1]), phi[s].max(phi[s + 1]));
            // levels pi/2 + m pi in (lo, hi]
            let m_lo = ((lo - FRAC_PI_2) / PI).floor() as i64 + 1;
            let m_hi = ((hi - FRAC_PI_2) / PI).floor() as i64;
            for m in m_lo..=m_hi {
                let theta = refine(path, s, i, j)?;
                let (a, b) = if m.rem_euclid(2) == 0 { (i, j) } else { (j, i) };
                events.push(CrossingEvent { theta, i: a + 1, j: b + 1 });
            }
        }
    }
    events.sort_by(|x, y| x.theta.total_cmp(&y.theta));
    Ok(events)
}

fn re_gap_at(path: &BandPath, reference: &[C64; 3], theta: f64, i: usize, j: usize) -> (f64, [C64; 3]) {
    let ev = match_bands(reference, &eigenvalues_at(&loop_point(&path.lp, theta)));
    ((ev[i] - ev[j]).re, ev)
}

/// Bisects `Re(E_i - E_j) = 0` inside sample interval `s`.
fn refine(path: &BandPath, s: usize, i: usize, j: usize) -> Result<f64> {
    let reference = path.at(s);
    let (mut ta, mut tb) = (path.thetas[s], path.thetas[s + 1]);
    let fa = (reference[i] - reference[j]).re;
    let sa = fa.signum();
    while tb - ta > BISECT_WIDTH {
        let tm = 0.5 * (ta + tb);
        let (fm, _) = re_gap_at(path, &reference, tm, i, j);
        if fm == 0.0 {
            ta = tm;
            tb = tm;
            break;
        }
        if fm.signum() == sa {
            ta = tm;
        } else {
            tb = tm;
        }
    }
    let theta = 0.5 * (ta + tb);
    let (_, here) = re_gap_at(path, &reference, theta, i, j);
    let h = 1e-6;
    let (fp, _) = re_gap_at(path, &here, theta + h, i, j);
    let (fm, _) = re_gap_at(path, &here, theta - h, i, j);
    let slope = (fp - fm) / (2.0 * h);
    if slope.abs() < TANGENT_SLOPE {
        return Err(Error::TangentialCrossing { theta, i: i + 1, j: j + 1 });
    }
    Ok(theta)
}
