use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::lm;
use crate::error::{Error, Result};
use crate::linalg::{c, expm, inner, vnorm, CMat3, CVec3, I};

pub const FIT_SEEDS: usize = 32;
pub const PARAMS: usize = 16;

const RANK_TOL: f64 = 1e-9;
const OFF_DIAG: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

/// Traceless 3x3 complex matrix: `[Re d1, Im d1, Re d2, Im d2]` then
/// `(Re, Im)` of the off-diagonals in row-major order; `d3 = -d1 - d2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenericH {
    pub params: [f64; PARAMS],
}

impl GenericH {
    pub fn from_slice(x: &[f64]) -> Self {
        let mut params = [0.0; PARAMS];
        params.copy_from_slice(&x[..PARAMS]);
        Self { params }
    }

    pub fn matrix(&self) -> CMat3 {
        let p = &self.params;
        let d1 = c(p[0], p[1]);
        let d2 = c(p[2], p[3]);
        let mut m = CMat3::zeros();
        m[(0, 0)] = d1;
        m[(1, 1)] = d2;
        m[(2, 2)] = -d1 - d2;
        for (n, &(i, j)) in OFF_DIAG.iter().enumerate() {
            m[(i, j)] = c(p[4 + 2 * n], p[5 + 2 * n]);
        }
        m
    }

    /// Parameters of `h - tr(h)/3`.
    pub fn from_matrix(h: &CMat3) -> Self {
        let t = h.trace() / 3.0;
        let mut params = [0.0; PARAMS];
        let (d1, d2) = (h[(0, 0)] - t, h[(1, 1)] - t);
        params[..4].copy_from_slice(&[d1.re, d1.im, d2.re, d2.im]);
        for (n, &(i, j)) in OFF_DIAG.iter().enumerate() {
            params[4 + 2 * n] = h[(i, j)].re;
            params[5 + 2 * n] = h[(i, j)].im;
        }
        Self { params }
    }
}

/// One constraint: the normalized population of `basis[level]` after
/// evolving `init` for `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub init: CVec3,
    pub basis: [CVec3; 3],
    pub level: usize,
    pub time: f64,
    pub value: f64,
}

/// `P_level / (P_1 + P_2 + P_3)` with `P_i = |<basis_i| e^{-iHt} |init>|^2`.
pub fn simulate(h: &CMat3, init: &CVec3, basis: &[CVec3; 3], level: usize, time: f64) -> f64 {
    let psi = expm(&(h * (-I * time))) * init;
    let p = basis.map(|b| inner(&b, &psi).norm_sqr());
    p[level] / (p[0] + p[1] + p[2])
}

#[derive(Debug, Clone, Serialize)]
pub struct GenericFit {
    pub h: GenericH,
    pub residual: f64,
    pub rank: usize,
}

fn residuals(x: &[f64], data: &[Measurement]) -> Vec<f64> {
    let h = GenericH::from_slice(x).matrix();
    data.iter()
        .map(|m| {
            let v = simulate(&h, &m.init, &m.basis, m.level, m.time) - m.value;
            if v.is_finite() {
                v
            } else {
                1e3
            }
        })
        .collect()
}

/// Residual norm of the model at `h` against `data`.
pub fn fit_residual(h: &GenericH, data: &[Measurement]) -> f64 {
    residuals(&h.params, data).iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Least-squares fit of the 16 parameters from [`FIT_SEEDS`] random starts.
pub fn generic_fit(data: &[Measurement], seed: u64) -> Result<GenericFit> {
    if data.len() < PARAMS {
        return Err(Error::RankDeficient { rank: data.len(), needed: PARAMS });
    }
    for m in data {
        let ok = m.level < 3 && m.time.is_finite() && m.value.is_finite() && vnorm(&m.init) > 0.0;
        if !ok {
            return Err(Error::InvalidInput("malformed measurement".into()));
        }
    }
    let f = |x: &[f64]| residuals(x, data);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let opts = lm::LmOptions { max_iter: 400, ..Default::default() };
    let mut best: Option<lm::LmResult> = None;
    for _ in 0..FIT_SEEDS {
        let x0: Vec<f64> = (0..PARAMS).map(|_| normal.sample(&mut rng)).collect();
        let r = lm::minimize(&f, &x0, &opts);
        if best.as_ref().is_none_or(|b| r.residual < b.residual) {
            best = Some(r);
        }
        if best.as_ref().is_some_and(|b| b.residual < 1e-13) {
            break;
        }
    }
    let best = best.expect("at least one seed");
    let j = lm::jacobian(&f, &best.x, data.len());
    let rank = lm::rank(&j, RANK_TOL);
    if rank < PARAMS {
        return Err(Error::RankDeficient { rank, needed: PARAMS });
    }
    Ok(GenericFit { h: GenericH::from_slice(&best.x), residual: best.residual, rank })
}
