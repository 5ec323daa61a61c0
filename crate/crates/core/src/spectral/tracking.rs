use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, TAU};

use super::{eigenvalues_at, label_order, min_gap};
use crate::braid::Permutation;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{discriminant, loop_point, Loop};

/// Samples with `|disc| <=` this count as lying on an exceptional point.
pub const EP_ON_LOOP_THRESHOLD: f64 = 1e-6;

const MAX_PAIR_ARG_STEP: f64 = FRAC_PI_4;
const MIN_STEP: f64 = 1e-11;

const PERMS3: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Eigenvalue bands continued along a loop. `bands[i][j]` is band `i + 1` at
/// `thetas[j]`; bands are labelled by descending real part at `theta = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct BandPath {
    #[serde(rename = "loop")]
    pub lp: Loop,
    pub thetas: Vec<f64>,
    pub bands: [Vec<C64>; 3],
}

impl BandPath {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn at(&self, j: usize) -> [C64; 3] {
        [self.bands[0][j], self.bands[1][j], self.bands[2][j]]
    }
}

/// Reorders `next` to minimize `sum |next[i] - prev[i]|`.
pub fn match_bands(prev: &[C64; 3], next: &[C64; 3]) -> [C64; 3] {
    let mut best = (f64::INFINITY, *next);
    for p in PERMS3 {
        let cand = [next[p[0]], next[p[1]], next[p[2]]];
        let cost: f64 = (0..3).map(|i| (cand[i] - prev[i]).norm()).sum();
        if cost < best.0 {
            best = (cost, cand);
        }
    }
    best.1
}

fn wrap(x: f64) -> f64 {
    let y = (x + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    if y <= -std::f64::consts::PI {
        y + TAU
    } else {
        y
    }
}

pub(crate) fn wrap_pi(x: f64) -> f64 {
    wrap(x)
}

fn step_ok(a: &[C64; 3], b: &[C64; 3]) -> bool {
    let step = (0..3).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max);
    if step > 0.5 * min_gap(a).min(min_gap(b)) {
        return false;
    }
    [(0, 1), (1, 2), (2, 0)].iter().all(|&(i, j)| {
        let da = (a[i] - a[j]).arg();
        let db = (b[i] - b[j]).arg();
        wrap(db - da).abs() <= MAX_PAIR_ARG_STEP
    })
}

fn sample(lp: &Loop, theta: f64) -> Result<[C64; 3]> {
    let p = loop_point(lp, theta);
    let d = discriminant(&p).norm();
    if d <= EP_ON_LOOP_THRESHOLD {
        return Err(Error::EpOnLoop { theta, disc_abs: d });
    }
    Ok(eigenvalues_at(&p))
}

/// Continues the three eigenvalues once around `lp`, starting from
/// `n_min` uniform samples and bisecting any step that is too large.
pub fn track_bands(lp: &Loop, n_min: usize) -> Result<BandPath> {
    let n = n_min.max(3);
    let mut cur = label_order(sample(lp, 0.0)?);
    let mut thetas = vec![0.0];
    let mut bands: [Vec<C64>; 3] = [vec![cur[0]], vec![cur[1]], vec![cur[2]]];
    let mut ta = 0.0;
    let mut pending: Vec<f64> = (1..=n).rev().map(|j| TAU * j as f64 / n as f64).collect();
    while let Some(tb) = pending.pop() {
        let next = match_bands(&cur, &sample(lp, tb)?);
        if step_ok(&cur, &next) {
            thetas.push(tb);
            for i in 0..3 {
                bands[i].push(next[i]);
            }
            cur = next;
            ta = tb;
        } else {
            if tb - ta < MIN_STEP {
                let d = discriminant(&loop_point(lp, tb)).norm();
                return Err(Error::EpOnLoop { theta: tb, disc_abs: d });
            }
            pending.push(tb);
            pending.push(0.5 * (ta + tb));
        }
    }
    Ok(BandPath { lp: *lp, thetas, bands })
}

/// `c(i) = j` when band `i` ends where band `j` started.
pub fn closure_permutation(path: &BandPath) -> Permutation {
    let last = path.len() - 1;
    let end = path.at(last);
    let start = path.at(0);
    let mut best = (f64::INFINITY, [0, 1, 2]);
    for p in PERMS3 {
        let cost: f64 = (0..3).map(|i| (end[i] - start[p[i]]).norm()).sum();
        if cost < best.0 {
            best = (cost, p);
        }
    }
    Permutation { images: best.1.to_vec() }
}
