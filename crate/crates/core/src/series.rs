//! Truncated power series with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// `sum_{k <= order} c_k x^k`, with all products truncated at `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<Complex64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    /// Pads or truncates `coeffs` to `order + 1` terms.
    pub fn new(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The series `x`.
    pub fn variable(order: usize) -> Self {
        Self::new(
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            order,
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplies by `x^k`, dropping terms above the order.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.order());
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + k <= self.order() {
                out.coeffs[i + k] = *c;
            }
        }
        out
    }

    pub fn evaluate(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    /// `self / rhs`; `None` when the constant term of `rhs` vanishes.
    pub fn div(&self, rhs: &Self) -> Option<Self> {
        let b0 = rhs.coeff(0);
        if b0 == Complex64::new(0.0, 0.0) {
            return None;
        }
        let n = self.order().min(rhs.order());
        let mut q = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let mut acc = self.coeff(k);
            for j in 1..=k {
                acc -= rhs.coeff(j) * q[k - j];
            }
            q[k] = acc / b0;
        }
        Some(Self { coeffs: q })
    }

    /// The square root whose constant term is `root0`; `root0^2` must equal the constant term.
    pub fn sqrt_with(&self, root0: Complex64) -> Option<Self> {
        if root0 == Complex64::new(0.0, 0.0) {
            return None;
        }
        let n = self.order();
        let mut s = vec![Complex64::new(0.0, 0.0); n + 1];
        s[0] = root0;
        for k in 1..=n {
            let mut acc = self.coeff(k);
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (2.0 * root0);
        }
        Some(Self { coeffs: s })
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        Series {
            coeffs: (0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self + &(-rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                out[i + j] += self.coeffs[i] * rhs.coeffs[j];
            }
        }
        Series { coeffs: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn geometric_series_by_division() {
        let one = Series::constant(c(1.0), 5);
        let denom = &one - &Series::variable(5);
        let q = one.div(&denom).unwrap();
        assert!(q.coeffs().iter().all(|z| (z - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Series::variable(6);
        let p = &Series::constant(c(4.0), 6) + &x.scale(c(3.0));
        let r = p.sqrt_with(c(2.0)).unwrap();
        let back = &r * &r;
        for k in 0..=6 {
            assert!((back.coeff(k) - p.coeff(k)).norm() < 1e-14);
        }
        assert!((r.coeff(1) - c(0.75)).norm() < 1e-15);
    }

    #[test]
    fn shift_and_evaluate() {
        let s = Series::new(vec![c(1.0), c(2.0)], 3).shift(2);
        assert_eq!(s.coeff(2), c(1.0));
        assert_eq!(s.coeff(3), c(2.0));
        assert_eq!(s.evaluate(c(2.0)), c(20.0));
    }

    #[test]
    fn division_by_zero_constant_rejected() {
        let x = Series::variable(3);
        assert!(Series::constant(c(1.0), 3).div(&x).is_none());
    }
}
