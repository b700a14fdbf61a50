//! Closed-form coefficient functions of the reduced equations.
//!
//! Indices follow the physical numbering: `alpha_k` for `k = 1..=n` lives at
//! `alpha[k - 1]`, and `alpha_0 = 0`. Empty sums are 0 and empty products 1;
//! every formula below goes through [`Angles`] so the conventions are applied
//! in exactly one place.

use crate::error::{Error, Result};
use crate::model::VehicleParams;

/// One-based view of the relative angles with `alpha_0 = 0` and cached
/// trigonometric values.
pub(crate) struct Angles {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Angles {
    pub(crate) fn new(alpha: &[f64]) -> Self {
        let mut cos = Vec::with_capacity(alpha.len() + 1);
        let mut sin = Vec::with_capacity(alpha.len() + 1);
        cos.push(1.0);
        sin.push(0.0);
        for a in alpha {
            let (s, c) = a.sin_cos();
            cos.push(c);
            sin.push(s);
        }
        Angles { cos, sin }
    }

    pub(crate) fn n(&self) -> usize {
        self.cos.len() - 1
    }

    pub(crate) fn cos(&self, k: usize) -> f64 {
        self.cos[k]
    }

    pub(crate) fn sin(&self, k: usize) -> f64 {
        self.sin[k]
    }

    /// `prod_{k=lo}^{hi} f(k)`, equal to 1 when `lo > hi`.
    pub(crate) fn product(lo: isize, hi: isize, f: impl Fn(usize) -> f64) -> f64 {
        (lo.max(0)..=hi).fold(1.0, |acc, k| acc * f(k as usize))
    }

    /// `sum_{k=lo}^{hi} f(k)`, equal to 0 when `lo > hi`.
    pub(crate) fn sum(lo: isize, hi: isize, f: impl Fn(usize) -> f64) -> f64 {
        (lo.max(0)..=hi).map(|k| f(k as usize)).sum()
    }

    /// `prod_{k=lo}^{hi} cos^2 alpha_k`.
    pub(crate) fn cos2_product(&self, lo: isize, hi: isize) -> f64 {
        Self::product(lo, hi, |k| self.cos[k] * self.cos[k])
    }

    /// `prod_{k=lo}^{hi} cos alpha_k`.
    pub(crate) fn cos_product(&self, lo: isize, hi: isize) -> f64 {
        Self::product(lo, hi, |k| self.cos[k])
    }
}

fn checked(params: &VehicleParams, alpha: &[f64]) -> Result<Angles> {
    Error::check_dim(params.trailers, alpha.len())?;
    Ok(Angles::new(alpha))
}

/// `A_k = (1/l) (prod_{j=1}^{k-2} cos alpha_j)(sin alpha_{k-1} - cos alpha_{k-1} sin alpha_k)`
/// for `k = 1..=n`. In particular `A_1 = -sin(alpha_1) / l`.
pub fn coeff_a(params: &VehicleParams, alpha: &[f64]) -> Result<Vec<f64>> {
    let ang = checked(params, alpha)?;
    Ok(a_terms(&ang, params.link))
}

pub(crate) fn a_terms(ang: &Angles, link: f64) -> Vec<f64> {
    (1..=ang.n())
        .map(|k| {
            let k = k as isize;
            let head = ang.cos_product(1, k - 2);
            let km1 = (k - 1) as usize;
            head * (ang.sin(km1) - ang.cos(km1) * ang.sin(k as usize)) / link
        })
        .collect()
}

/// `R(alpha) = M + m sum_{j=1}^n prod_{k=1}^j cos^2 alpha_k + (J/l^2)(1 - prod_{k=1}^n cos^2 alpha_k)`.
///
/// Strictly positive for every `alpha`; equals `M` when `n = 0`.
pub fn coeff_r(params: &VehicleParams, alpha: &[f64]) -> Result<f64> {
    let ang = checked(params, alpha)?;
    Ok(r_value(params, &ang))
}

pub(crate) fn r_value(p: &VehicleParams, ang: &Angles) -> f64 {
    let n = ang.n() as isize;
    p.car_mass
        + p.trailer_mass * Angles::sum(1, n, |j| ang.cos2_product(1, j as isize))
        + p.trailer_inertia / (p.link * p.link) * (1.0 - ang.cos2_product(1, n))
}

/// `Q(alpha) = cos alpha_1 sin alpha_1 (m l^2 sum_{j=1}^n prod_{k=2}^j cos^2 alpha_k - J prod_{k=2}^n cos^2 alpha_k)`.
///
/// Defined as 0 when there are no trailers.
pub fn coeff_q(params: &VehicleParams, alpha: &[f64]) -> Result<f64> {
    let ang = checked(params, alpha)?;
    Ok(q_value(params, &ang))
}

pub(crate) fn q_value(p: &VehicleParams, ang: &Angles) -> f64 {
    let n = ang.n() as isize;
    if n == 0 {
        return 0.0;
    }
    let l2 = p.link * p.link;
    ang.cos(1)
        * ang.sin(1)
        * (p.trailer_mass * l2 * Angles::sum(1, n, |j| ang.cos2_product(2, j as isize))
            - p.trailer_inertia * ang.cos2_product(2, n))
}

/// Analytic gradient `dR/dalpha_k`, `k = 1..=n`.
///
/// With `P_j = prod_{i<=j} cos^2 alpha_i`,
/// `dR/dalpha_k = -2 cos alpha_k sin alpha_k P_{k-1}
///     (m sum_{j>=k} prod_{i=k+1}^j cos^2 alpha_i - (J/l^2) prod_{i=k+1}^n cos^2 alpha_i)`.
pub fn grad_r(params: &VehicleParams, alpha: &[f64]) -> Result<Vec<f64>> {
    let ang = checked(params, alpha)?;
    Ok(grad_r_terms(params, &ang))
}

pub(crate) fn grad_r_terms(p: &VehicleParams, ang: &Angles) -> Vec<f64> {
    let n = ang.n() as isize;
    let jl2 = p.trailer_inertia / (p.link * p.link);
    (1..=n)
        .map(|k| {
            let ku = k as usize;
            let tail_sum = Angles::sum(k, n, |j| ang.cos2_product(k + 1, j as isize));
            let tail_all = ang.cos2_product(k + 1, n);
            -2.0 * ang.cos(ku)
                * ang.sin(ku)
                * ang.cos2_product(1, k - 1)
                * (p.trailer_mass * tail_sum - jl2 * tail_all)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn params(n: usize) -> VehicleParams {
        VehicleParams::default().with_trailers(n)
    }

    #[test]
    fn a_vanishes_at_alignment() {
        let a = coeff_a(&params(4), &[0.0; 4]).unwrap();
        assert!(a.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn a1_at_right_angle() {
        let p = params(1);
        let a = coeff_a(&p, &[FRAC_PI_2]).unwrap();
        assert!((a[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn r_special_values() {
        let p = params(3);
        let r = coeff_r(&p, &[0.0; 3]).unwrap();
        assert!((r - p.total_mass()).abs() < 1e-14);

        let p1 = params(1);
        let r = coeff_r(&p1, &[FRAC_PI_2]).unwrap();
        let expect = p1.car_mass + p1.trailer_inertia / (p1.link * p1.link);
        assert!((r - expect).abs() < 1e-14);

        let p0 = params(0);
        assert_eq!(coeff_r(&p0, &[]).unwrap(), p0.car_mass);
        assert_eq!(coeff_q(&p0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn q_single_trailer_form() {
        let p = params(1);
        for &a in &[0.3, 1.1, -2.0, 2.9] {
            let q = coeff_q(&p, &[a]).unwrap();
            let l2 = p.link * p.link;
            let expect = a.cos() * a.sin() * (p.trailer_mass * l2 - p.trailer_inertia);
            assert!((q - expect).abs() < 1e-14);
        }
        assert_eq!(coeff_q(&params(3), &[0.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(
            coeff_r(&params(2), &[0.1]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }
}
