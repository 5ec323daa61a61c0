//! Exact Laurent polynomials in one variable `t` with integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// `sum_k coeffs[k] t^(low + k)`, kept trimmed so that equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Laurent {
    low: i32,
    coeffs: Vec<i128>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self { low: 0, coeffs: Vec::new() }
    }

    pub fn monomial(c: i128, deg: i32) -> Self {
        Self { low: deg, coeffs: vec![c] }.trimmed()
    }

    pub fn constant(c: i128) -> Self {
        Self::monomial(c, 0)
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^deg`.
    pub fn coeff(&self, deg: i32) -> i128 {
        let k = deg - self.low;
        if k < 0 {
            return 0;
        }
        self.coeffs.get(k as usize).copied().unwrap_or(0)
    }

    /// Value at `t = 1`.
    pub fn at_one(&self) -> i128 {
        self.coeffs.iter().sum()
    }

    fn high(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            return Self::zero();
        }
        self.coeffs.drain(..lead);
        self.low += lead as i32;
        self
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, o: &Laurent) -> Laurent {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let coeffs = (low..=high).map(|d| self.coeff(d) + o.coeff(d)).collect();
        Laurent { low, coeffs }.trimmed()
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, o: &Laurent) -> Laurent {
        self + &(-o)
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    fn mul(self, o: &Laurent) -> Laurent {
        if self.is_zero() || o.is_zero() {
            return Laurent::zero();
        }
        let mut coeffs = vec![0i128; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Laurent { low: self.low + o.low, coeffs }.trimmed()
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let d = self.low + k as i32;
            if !first {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match d {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    if d == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_inverse() {
        let t = Laurent::monomial(1, 1);
        let ti = Laurent::monomial(1, -1);
        assert_eq!(&t * &ti, Laurent::one());
    }

    #[test]
    fn cancellation_trims() {
        let a = &Laurent::monomial(3, -2) + &Laurent::monomial(1, 4);
        let b = &a - &Laurent::monomial(3, -2);
        assert_eq!(b, Laurent::monomial(1, 4));
        assert!((&a - &a).is_zero());
        assert_eq!(Laurent::monomial(0, 5), Laurent::zero());
    }

    #[test]
    fn display() {
        let p = &(&Laurent::monomial(-1, 1) + &Laurent::constant(2)) + &Laurent::monomial(1, -1);
        assert_eq!(p.to_string(), "-t + 2 + t^-1");
    }

    #[test]
    fn square_of_binomial() {
        let p = &Laurent::monomial(1, 1) + &Laurent::one();
        let sq = &p * &p;
        assert_eq!((sq.coeff(0), sq.coeff(1), sq.coeff(2)), (1, 2, 1));
        assert_eq!(sq.at_one(), 4);
    }
}
