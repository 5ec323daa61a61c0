//! Reduced Burau representation over exact Laurent polynomials.

use super::laurent::Laurent;
use super::{BraidWord, Letter};

/// Square matrix of Laurent polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LMatrix {
    n: usize,
    a: Vec<Laurent>,
}

impl LMatrix {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![Laurent::zero(); n * n];
        for i in 0..n {
            a[i * n + i] = Laurent::one();
        }
        Self { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.a[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Laurent) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &LMatrix) -> LMatrix {
        let n = self.n;
        let mut out = LMatrix { n, a: vec![Laurent::zero(); n * n] };
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = o.get(k, j);
                    if y.is_zero() {
                        continue;
                    }
                    let s = &out.a[i * n + j] + &(x * y);
                    out.a[i * n + j] = s;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Laurent {
        (0..self.n).fold(Laurent::zero(), |acc, i| &acc + self.get(i, i))
    }
}

/// Image of a single letter on `strands` strands.
pub fn letter_matrix(l: Letter, strands: usize) -> LMatrix {
    let d = strands - 1;
    let mut m = LMatrix::identity(d);
    let r = l.gen - 1;
    let (left, diag, right) = if l.sign > 0 {
        (Laurent::monomial(1, 1), Laurent::monomial(-1, 1), Laurent::one())
    } else {
        (Laurent::one(), Laurent::monomial(-1, -1), Laurent::monomial(1, -1))
    };
    if r > 0 {
        m.set(r, r - 1, left);
    }
    m.set(r, r, diag);
    if r + 1 < d {
        m.set(r, r + 1, right);
    }
    m
}

pub fn burau(w: &BraidWord) -> LMatrix {
    w.letters
        .iter()
        .fold(LMatrix::identity(w.strands - 1), |acc, &l| acc.mul(&letter_matrix(l, w.strands)))
}
