//! Polynomials in `cos v_i`, `sin v_i` of a fixed set of angles, kept in
//! the normal form where each `sin v_i` appears at most to the first power
//! (`sin^2 = 1 - cos^2`). Enough algebra to differentiate and bracket the
//! distribution fields exactly.

use std::collections::BTreeMap;

/// `prod_i cos^{c_i}(v_i) sin^{s_i}(v_i)` with `s_i` in `{0, 1}` stored as bits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Monomial {
    cos: Vec<u16>,
    sin: u64,
}

impl Monomial {
    fn one(vars: usize) -> Self {
        Monomial {
            cos: vec![0; vars],
            sin: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TrigPoly {
    vars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl TrigPoly {
    pub fn zero(vars: usize) -> Self {
        assert!(vars <= 64, "too many angle variables");
        TrigPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: f64) -> Self {
        let mut p = TrigPoly::zero(vars);
        p.push(Monomial::one(vars), c);
        p
    }

    pub fn cos(vars: usize, v: usize) -> Self {
        let mut m = Monomial::one(vars);
        m.cos[v] = 1;
        let mut p = TrigPoly::zero(vars);
        p.push(m, 1.0);
        p
    }

    pub fn sin(vars: usize, v: usize) -> Self {
        let mut m = Monomial::one(vars);
        m.sin |= 1 << v;
        let mut p = TrigPoly::zero(vars);
        p.push(m, 1.0);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&m);
        }
    }

    /// Drops terms negligible against the largest coefficient.
    fn prune(mut self) -> Self {
        let big = self.terms.values().fold(0.0_f64, |m, c| m.max(c.abs()));
        self.terms.retain(|_, c| c.abs() > 1e-13 * big);
        self
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(m.clone(), *c);
        }
        out.prune()
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> TrigPoly {
        let mut out = TrigPoly::zero(self.vars);
        if s != 0.0 {
            for (m, c) in &self.terms {
                out.push(m.clone(), c * s);
            }
        }
        out
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero(self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let base = Monomial {
                    cos: ma.cos.iter().zip(&mb.cos).map(|(a, b)| a + b).collect(),
                    sin: ma.sin ^ mb.sin,
                };
                // Each shared sine squares to 1 - cos^2.
                let shared = ma.sin & mb.sin;
                let mut expanded = vec![(ca * cb, base)];
                for v in (0..self.vars).filter(|v| shared >> v & 1 == 1) {
                    let mut next = Vec::with_capacity(expanded.len() * 2);
                    for (c, m) in expanded {
                        let mut m2 = m.clone();
                        m2.cos[v] += 2;
                        next.push((c, m));
                        next.push((-c, m2));
                    }
                    expanded = next;
                }
                for (c, m) in expanded {
                    out.push(m, c);
                }
            }
        }
        out.prune()
    }

    /// Partial derivative with respect to the angle `v`.
    pub fn diff(&self, v: usize) -> TrigPoly {
        let mut out = TrigPoly::zero(self.vars);
        for (m, c) in &self.terms {
            let a = m.cos[v];
            if m.sin >> v & 1 == 1 {
                // d(cos^a sin) = -a cos^{a-1} + (a+1) cos^{a+1}
                if a > 0 {
                    let mut lo = m.clone();
                    lo.sin &= !(1 << v);
                    lo.cos[v] = a - 1;
                    out.push(lo, -(a as f64) * c);
                }
                let mut hi = m.clone();
                hi.sin &= !(1 << v);
                hi.cos[v] = a + 1;
                out.push(hi, (a as f64 + 1.0) * c);
            } else if a > 0 {
                // d(cos^a) = -a cos^{a-1} sin
                let mut d = m.clone();
                d.cos[v] = a - 1;
                d.sin |= 1 << v;
                out.push(d, -(a as f64) * c);
            }
        }
        out.prune()
    }

    pub fn eval(&self, angles: &[f64]) -> f64 {
        let cs: Vec<(f64, f64)> = angles.iter().map(|a| a.sin_cos()).collect();
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = *c;
                for (i, (s, co)) in cs.iter().enumerate() {
                    v *= co.powi(m.cos[i] as i32);
                    if m.sin >> i & 1 == 1 {
                        v *= s;
                    }
                }
                v
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagoras_cancels() {
        let c = TrigPoly::cos(2, 1);
        let s = TrigPoly::sin(2, 1);
        let one = c.mul(&c).add(&s.mul(&s));
        assert_eq!(one, TrigPoly::constant(2, 1.0));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let p = TrigPoly::cos(2, 0)
            .mul(&TrigPoly::sin(2, 1))
            .mul(&TrigPoly::sin(2, 1))
            .add(&TrigPoly::sin(2, 0).scale(3.0));
        let x = [0.4, -1.1];
        let h = 1e-6;
        for v in 0..2 {
            let (mut up, mut dn) = (x, x);
            up[v] += h;
            dn[v] -= h;
            let fd = (p.eval(&up) - p.eval(&dn)) / (2.0 * h);
            assert!((fd - p.diff(v).eval(&x)).abs() < 1e-8);
        }
    }
}
