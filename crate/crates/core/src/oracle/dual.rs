//! Forward-mode automatic differentiation with a fixed-width gradient.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Width of the gradient; bounds the configuration dimension `n + 3`.
pub(crate) const MAXD: usize = 12;

/// Arithmetic needed by the oracle formulas, for both plain and dual numbers.
pub(crate) trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dual {
    pub v: f64,
    pub d: [f64; MAXD],
}

impl Dual {
    /// The `i`-th independent variable with value `v`.
    pub fn var(v: f64, i: usize) -> Self {
        let mut d = [0.0; MAXD];
        d[i] = 1.0;
        Dual { v, d }
    }

    /// Seeds every entry of `x` as its own independent variable.
    pub fn vars(x: &[f64]) -> Vec<Dual> {
        assert!(x.len() <= MAXD, "dual gradient width {MAXD} exceeded");
        x.iter().enumerate().map(|(i, v)| Dual::var(*v, i)).collect()
    }

    fn map(self, f: f64, df: f64) -> Self {
        let mut d = self.d;
        d.iter_mut().for_each(|x| *x *= df);
        Dual { v: f, d }
    }
}

impl Scalar for Dual {
    fn cst(v: f64) -> Self {
        Dual { v, d: [0.0; MAXD] }
    }
    fn sin(self) -> Self {
        self.map(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.map(self.v.cos(), -self.v.sin())
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(mut self, o: Dual) -> Dual {
        self.v += o.v;
        self.d.iter_mut().zip(o.d).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(mut self, o: Dual) -> Dual {
        self.v -= o.v;
        self.d.iter_mut().zip(o.d).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut d = [0.0; MAXD];
        for (di, (a, b)) in d.iter_mut().zip(self.d.iter().zip(&o.d)) {
            *di = a * o.v + self.v * b;
        }
        Dual { v: self.v * o.v, d }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        let q = self.v * inv;
        let mut d = [0.0; MAXD];
        for (di, (a, b)) in d.iter_mut().zip(self.d.iter().zip(&o.d)) {
            *di = (a - q * b) * inv;
        }
        Dual { v: q, d }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self.map(-self.v, -1.0)
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, s: f64) -> Dual {
        self.map(self.v * s, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::var(0.7, 0);
        let y = Dual::var(-1.3, 1);
        let f = (x * y.sin() - x.cos() / y) * 2.0;
        let dfdx = 2.0 * (y.v.sin() + x.v.sin() / y.v);
        let dfdy = 2.0 * (x.v * y.v.cos() + x.v.cos() / (y.v * y.v));
        assert!((f.d[0] - dfdx).abs() < 1e-15);
        assert!((f.d[1] - dfdy).abs() < 1e-15);
    }
}
