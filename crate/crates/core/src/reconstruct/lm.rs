//! Levenberg-Marquardt with a central-difference Jacobian.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once the cost `0.5 |r|^2` drops below this.
    pub cost_floor: f64,
    pub step_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iter: 200, cost_floor: 1e-30, step_tol: 1e-15 }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub x: Vec<f64>,
    /// `|r(x)|`
    pub residual: f64,
}

pub fn jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], m: usize) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for c in 0..n {
        let h = 1e-7 * (1.0 + x[c].abs());
        xp[c] = x[c] + h;
        let fp = f(&xp);
        xp[c] = x[c] - h;
        let fm = f(&xp);
        xp[c] = x[c];
        for r in 0..m {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn minimize(f: &dyn Fn(&[f64]) -> Vec<f64>, x0: &[f64], opts: &LmOptions) -> LmResult {
    let mut x = x0.to_vec();
    let mut r = f(&x);
    let mut cost = 0.5 * norm(&r).powi(2);
    let mut lambda = 1e-3;
    let mut it = 0;
    while it < opts.max_iter && cost > opts.cost_floor && cost.is_finite() {
        it += 1;
        let j = jacobian(f, &x, r.len());
        let rv = DVector::from_column_slice(&r);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * rv;
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += lambda * (jtj[(d, d)] + 1e-12);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rn = f(&xn);
            let cn = 0.5 * norm(&rn).powi(2);
            if cn.is_finite() && cn < cost {
                let small = step.norm() <= opts.step_tol * (1.0 + norm(&x));
                x = xn;
                r = rn;
                cost = cn;
                lambda = (lambda * 0.3).max(1e-15);
                accepted = !small;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    LmResult { residual: norm(&r), x }
}

/// Numerical rank with singular values above `rel * s_max`.
pub fn rank(j: &DMatrix<f64>, rel: f64) -> usize {
    let s = j.clone().singular_values();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&v| v > rel * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]];
        let r = minimize(&f, &[-1.2, 1.0], &LmOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-10 && (r.x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn linear_least_squares() {
        // fit y = a t + b to exact data
        let ts = [0.0, 1.0, 2.0, 3.0];
        let f = |x: &[f64]| ts.iter().map(|t| x[0] * t + x[1] - (2.0 * t - 1.0)).collect::<Vec<_>>();
        let r = minimize(&f, &[0.0, 0.0], &LmOptions::default());
        assert!((r.x[0] - 2.0).abs() < 1e-10 && (r.x[1] + 1.0).abs() < 1e-10);
        let j = jacobian(&f, &r.x, 4);
        assert_eq!(rank(&j, 1e-9), 2);
    }
}
