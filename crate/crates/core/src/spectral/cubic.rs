//! Closed-form roots of complex monic cubics.

use crate::linalg::C64;

const POLISH_STEPS: usize = 3;

/// Monic cubic `x^3 + a x^2 + b x + c`.
#[derive(Debug, Clone, Copy)]
pub struct Cubic {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl Cubic {
    pub fn new(a: C64, b: C64, c: C64) -> Self {
        Self { a, b, c }
    }

    pub fn eval(&self, x: C64) -> C64 {
        ((x + self.a) * x + self.b) * x + self.c
    }

    pub fn derivative(&self, x: C64) -> C64 {
        (3.0 * x + 2.0 * self.a) * x + self.b
    }

    pub fn second_derivative(&self, x: C64) -> C64 {
        6.0 * x + 2.0 * self.a
    }

    /// All three roots with multiplicity, by Cardano's formula followed by a
    /// guarded Newton polish of each root.
    pub fn roots(&self) -> [C64; 3] {
        let mut r = self.cardano();
        for x in r.iter_mut() {
            *x = self.polish(*x);
        }
        r
    }

    fn cardano(&self) -> [C64; 3] {
        let (a, b, c) = (self.a, self.b, self.c);
        let d0 = a * a - 3.0 * b;
        let d1 = 2.0 * a * a * a - 9.0 * a * b + 27.0 * c;
        let disc = (d1 * d1 - 4.0 * d0 * d0 * d0).sqrt();
        let plus = (d1 + disc) * 0.5;
        let minus = (d1 - disc) * 0.5;
        let base = if plus.norm() >= minus.norm() { plus } else { minus };
        let shift = -a / 3.0;
        if base.norm() == 0.0 {
            // d0 = d1 = 0: triple root
            return [shift; 3];
        }
        let cc = base.cbrt();
        let omega = C64::new(-0.5, 3f64.sqrt() / 2.0);
        let mut out = [C64::new(0.0, 0.0); 3];
        let mut rot = C64::new(1.0, 0.0);
        for x in out.iter_mut() {
            let ck = rot * cc;
            *x = -(a + ck + d0 / ck) / 3.0;
            rot *= omega;
        }
        out
    }

    fn polish(&self, mut x: C64) -> C64 {
        let mut fx = self.eval(x).norm();
        for _ in 0..POLISH_STEPS {
            let d = self.derivative(x);
            if d.norm() < 1e-300 || fx == 0.0 {
                break;
            }
            let cand = x - self.eval(x) / d;
            let fc = self.eval(cand).norm();
            if !(fc < fx) {
                break;
            }
            x = cand;
            fx = fc;
        }
        x
    }
}

/// Sorts complex numbers lexicographically by `(re, im)`, ascending.
pub fn sort_lex(v: &mut [C64]) {
    v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}
