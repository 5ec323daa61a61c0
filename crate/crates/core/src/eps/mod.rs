//! Exceptional points: zeros of the discriminant in the `(k1, k2)` plane,
//! their winding charges, order and continuation in `alpha`.

mod order;
mod paths;

pub use order::{ep_order, EpOrder, SNAP_RADIUS};
pub use paths::{
    trace_ep_paths, trace_ep_paths_with, transition_alpha, transition_alpha_from, EpLabel,
    EpTrajectory, EventKind, PathEvent, TraceConfig,
};

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{discriminant, discriminant_gradient, ModelParams};

/// Residual `|disc|` below which a Newton limit counts as a zero.
pub const ZERO_RESIDUAL: f64 = 1e-10;
/// Zeros closer than this are the same point.
pub const DEDUP_RADIUS: f64 = 1e-6;

const NEWTON_MAX_ITER: usize = 400;
const WINDING_SEGMENTS: usize = 64;
const WINDING_MAX_DEPTH: usize = 40;

/// Axis-aligned rectangle in the `(k1, k2)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub k1: (f64, f64),
    pub k2: (f64, f64),
}

impl Rect {
    pub fn new(k1_min: f64, k1_max: f64, k2_min: f64, k2_max: f64) -> Result<Self> {
        let ok = [k1_min, k1_max, k2_min, k2_max].iter().all(|x| x.is_finite())
            && k1_min < k1_max
            && k2_min < k2_max;
        if !ok {
            return Err(Error::InvalidInput("region must be finite and non-empty".into()));
        }
        Ok(Self { k1: (k1_min, k1_max), k2: (k2_min, k2_max) })
    }

    pub fn square(center: (f64, f64), half: f64) -> Result<Self> {
        Self::new(center.0 - half, center.0 + half, center.1 - half, center.1 + half)
    }

    pub fn contains(&self, k: (f64, f64), slack: f64) -> bool {
        k.0 >= self.k1.0 - slack
            && k.0 <= self.k1.1 + slack
            && k.1 >= self.k2.0 - slack
            && k.1 <= self.k2.1 + slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegeneratePair {
    /// 1-based band labels.
    Pair(usize, usize),
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpRecord {
    pub alpha: f64,
    pub position: (f64, f64),
    pub charge: Option<i32>,
    pub order: Option<u8>,
    pub degenerate_pair: Option<DegeneratePair>,
    pub residual: f64,
}

fn disc_at(alpha: f64, k: (f64, f64)) -> C64 {
    discriminant(&ModelParams { alpha, k1: k.0, k2: k.1 })
}

/// Newton step on `(k1, k2) -> (Re disc, Im disc)`.
pub(crate) fn newton_step(alpha: f64, k: (f64, f64)) -> Option<(f64, f64)> {
    let p = ModelParams { alpha, k1: k.0, k2: k.1 };
    let d = discriminant(&p);
    let [g1, g2, _] = discriminant_gradient(&p);
    let det = g1.re * g2.im - g2.re * g1.im;
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let dx = (-d.re * g2.im + d.im * g2.re) / det;
    let dy = (-g1.re * d.im + g1.im * d.re) / det;
    Some((dx, dy))
}

/// Damped Newton from `k0` at fixed `alpha`; returns the limit and `|disc|`.
pub(crate) fn newton_zero(alpha: f64, k0: (f64, f64)) -> ((f64, f64), f64) {
    let mut k = k0;
    let mut f = disc_at(alpha, k).norm();
    for _ in 0..NEWTON_MAX_ITER {
        if f == 0.0 {
            break;
        }
        let Some((dx, dy)) = newton_step(alpha, k) else { break };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand = (k.0 + t * dx, k.1 + t * dy);
            let fc = disc_at(alpha, cand).norm();
            if fc < f {
                k = cand;
                f = fc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        let len = t * dx.hypot(dy);
        if !moved || len <= 1e-16 * (1.0 + k.0.hypot(k.1)) || k.0.hypot(k.1) > 1e3 {
            break;
        }
    }
    (k, f)
}

pub(crate) fn dedup_zeros(mut found: Vec<((f64, f64), f64)>) -> Vec<((f64, f64), f64)> {
    found.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut kept: Vec<((f64, f64), f64)> = Vec::new();
    for (k, r) in found {
        if kept.iter().all(|(q, _)| (q.0 - k.0).hypot(q.1 - k.1) > DEDUP_RADIUS) {
            kept.push((k, r));
        }
    }
    kept.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));
    kept
}

/// Zeros of the discriminant in `region`, from Newton started at the centers
/// of a `grid x grid` lattice. Charge and order are left unset.
pub fn find_eps(alpha: f64, region: &Rect, grid: usize) -> Result<Vec<EpRecord>> {
    if grid == 0 || !alpha.is_finite() {
        return Err(Error::InvalidInput("grid must be positive and alpha finite".into()));
    }
    let mut found = Vec::new();
    let (w1, w2) = (region.k1.1 - region.k1.0, region.k2.1 - region.k2.0);
    for a in 0..grid {
        for b in 0..grid {
            let seed = (
                region.k1.0 + w1 * (a as f64 + 0.5) / grid as f64,
                region.k2.0 + w2 * (b as f64 + 0.5) / grid as f64,
            );
            let (k, r) = newton_zero(alpha, seed);
            if r <= ZERO_RESIDUAL && region.contains(k, 1e-9) {
                found.push((k, r));
            }
        }
    }
    Ok(dedup_zeros(found)
        .into_iter()
        .map(|(k, r)| EpRecord {
            alpha,
            position: k,
            charge: None,
            order: None,
            degenerate_pair: None,
            residual: r,
        })
        .collect())
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

fn winding_segment(
    f: &dyn Fn(f64) -> C64,
    a: f64,
    b: f64,
    fa: C64,
    fb: C64,
    depth: usize,
) -> Result<f64> {
    let step = wrap(fb.arg() - fa.arg());
    if step.abs() <= FRAC_PI_4 {
        return Ok(step);
    }
    if depth >= WINDING_MAX_DEPTH {
        if step.abs() > FRAC_PI_2 {
            return Err(Error::PhaseStepTooLarge { step: step.abs() });
        }
        return Ok(step);
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    Ok(winding_segment(f, a, m, fa, fm, depth + 1)? + winding_segment(f, m, b, fm, fb, depth + 1)?)
}

/// Total change of `arg f` over `[0, 2pi)`, refined until every step is
/// below `pi/4`.
pub(crate) fn total_phase(f: &dyn Fn(f64) -> C64) -> Result<f64> {
    let mut total = 0.0;
    let mut prev = f(0.0);
    for s in 0..WINDING_SEGMENTS {
        let a = TAU * s as f64 / WINDING_SEGMENTS as f64;
        let b = TAU * (s + 1) as f64 / WINDING_SEGMENTS as f64;
        let fb = f(b);
        total += winding_segment(f, a, b, prev, fb, 0)?;
        prev = fb;
    }
    Ok(total)
}

/// Discriminant number `(i / 2pi) * oint d log disc` along the
/// counter-clockwise circle, i.e. `-(total arg change) / 2pi`.
pub fn charge(alpha: f64, center: (f64, f64), radius: f64) -> Result<i32> {
    if !(radius > 0.0 && radius.is_finite() && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("bad charge circle radius {radius}")));
    }
    let f = |beta: f64| disc_at(alpha, (center.0 + radius * beta.cos(), center.1 + radius * beta.sin()));
    let nu = -total_phase(&f)? / TAU;
    let r = nu.round();
    if (nu - r).abs() >= 0.05 {
        return Err(Error::NonIntegerWinding { value: nu });
    }
    Ok(r as i32)
}

/// Charge circle radius around `k` that keeps the other zeros outside.
pub(crate) fn isolating_radius(k: (f64, f64), others: &[(f64, f64)], cap: f64) -> f64 {
    let nearest = others
        .iter()
        .map(|q| (q.0 - k.0).hypot(q.1 - k.1))
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    cap.min(0.4 * nearest)
}

/// `find_eps` with charges and orders filled in.
pub fn catalog(alpha: f64, region: &Rect, grid: usize, charge_radius: f64) -> Result<Vec<EpRecord>> {
    let mut recs = find_eps(alpha, region, grid)?;
    let pts: Vec<(f64, f64)> = recs.iter().map(|r| r.position).collect();
    for r in recs.iter_mut() {
        let rad = isolating_radius(r.position, &pts, charge_radius);
        r.charge = Some(charge(alpha, r.position, rad)?);
        let o = ep_order(alpha, r.position)?;
        r.order = Some(o.order);
        r.degenerate_pair = Some(o.degenerate_pair);
    }
    Ok(recs)
}
