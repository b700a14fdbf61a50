//! Relative equilibria of the reduced system.
//!
//! With a positive offset `a` every energy level carries `2^(n+1)` isolated
//! equilibria, all hyperbolic, given by straight-line motion with each
//! trailer either aligned with or folded back over its predecessor. With
//! `a = 0` the angular velocity is conserved and the equilibria are
//! circular motions.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{reduced_rhs, reduced_vector_field, torus_rhs};
use crate::error::{Error, Result};
use crate::model::{energy_unchecked, ReducedState, VehicleParams};

const RESIDUAL_TOL: f64 = 1e-10;

/// Signs `sigma_0 = cos beta` (forward or backward motion) and
/// `sigma_k = cos alpha_k` (trailer `k` aligned or folded back).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumSignature {
    pub sigma0: i8,
    pub sigma: Vec<i8>,
}

impl EquilibriumSignature {
    pub fn new(sigma0: i8, sigma: Vec<i8>) -> Result<Self> {
        let sig = EquilibriumSignature { sigma0, sigma };
        if std::iter::once(&sig.sigma0)
            .chain(&sig.sigma)
            .any(|s| *s != 1 && *s != -1)
        {
            return Err(Error::Precondition(format!(
                "signature entries equal to +1 or -1 (got {sig})"
            )));
        }
        Ok(sig)
    }

    /// All `2^(n+1)` signatures in lexicographic order, `-1` before `+1`.
    pub fn all(n: usize) -> Vec<EquilibriumSignature> {
        let count = 1usize << (n + 1);
        let sign = |bit: bool| if bit { 1 } else { -1 };
        (0..count)
            .map(|code| {
                let bit = |i: usize| (code >> (n - i)) & 1 == 1;
                EquilibriumSignature {
                    sigma0: sign(bit(0)),
                    sigma: (1..=n).map(|i| sign(bit(i))).collect(),
                }
            })
            .collect()
    }

    pub fn trailers(&self) -> usize {
        self.sigma.len()
    }

    /// No trailer folded back over its predecessor.
    pub fn is_physical(&self) -> bool {
        self.sigma.iter().all(|s| *s == 1)
    }

    /// Partial products `prod_{j=0}^{k} sigma_j` for `k = 0..=n`.
    fn partial_products(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.sigma.len() + 1);
        let mut acc = self.sigma0 as f64;
        out.push(acc);
        for s in &self.sigma {
            acc *= *s as f64;
            out.push(acc);
        }
        out
    }

    /// Torus angles `(beta, alpha)` of the equilibrium.
    pub fn angles(&self) -> Vec<f64> {
        let angle = |s: i8| if s > 0 { 0.0 } else { std::f64::consts::PI };
        std::iter::once(angle(self.sigma0))
            .chain(self.sigma.iter().map(|s| angle(*s)))
            .collect()
    }
}

impl fmt::Display for EquilibriumSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |s: i8| if s > 0 { '+' } else { '-' };
        write!(f, "({}", sym(self.sigma0))?;
        for s in &self.sigma {
            write!(f, ",{}", sym(*s))?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    StableNode,
    UnstableNode,
    Saddle,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::StableNode => "stable node",
            Stability::UnstableNode => "unstable node",
            Stability::Saddle => "saddle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub signature: EquilibriumSignature,
    pub state: ReducedState,
    /// Eigenvalues of the linearization on the energy torus, ordered
    /// `beta, alpha_1, ..., alpha_n`.
    pub eigenvalues: Vec<f64>,
    pub stability: Stability,
    pub physical: bool,
}

fn check_positive_offset(params: &VehicleParams, energy: f64) -> Result<()> {
    params.validate()?;
    if !(params.offset > 0.0) {
        return Err(Error::Precondition(
            "a positive centre-of-mass offset a (use equilibria_a0 when a = 0)".to_string(),
        ));
    }
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    Ok(())
}

/// Equilibrium speed `sqrt(2E / (M + n m))`.
fn cruise_speed(params: &VehicleParams, energy: f64) -> f64 {
    (2.0 * energy / params.total_mass()).sqrt()
}

/// Closed-form Jacobian of the torus flow at the equilibrium with the given
/// signature. The matrix is lower bidiagonal.
fn closed_form_jacobian(
    params: &VehicleParams,
    energy: f64,
    sig: &EquilibriumSignature,
) -> DMatrix<f64> {
    let n = sig.trailers();
    let speed = cruise_speed(params, energy);
    let inertia = params.car_axle_inertia();
    let c = speed / params.link;
    let prods = sig.partial_products();

    let mut jac = DMatrix::zeros(n + 1, n + 1);
    jac[(0, 0)] = -(params.car_mass * params.offset / inertia) * speed * sig.sigma0 as f64;
    for k in 1..=n {
        jac[(k, k)] = -c * prods[k];
        jac[(k, k - 1)] = if k == 1 {
            (2.0 * energy / inertia).sqrt() * sig.sigma0 as f64
        } else {
            c * prods[k - 1]
        };
    }
    jac
}

/// All `2^(n+1)` equilibria on the energy level `energy`, ordered
/// lexicographically by signature.
pub fn enumerate_equilibria(params: &VehicleParams, energy: f64) -> Result<Vec<EquilibriumPoint>> {
    check_positive_offset(params, energy)?;
    let speed = cruise_speed(params, energy);
    EquilibriumSignature::all(params.trailers)
        .into_iter()
        .map(|sig| {
            let angles = sig.angles();
            let state = ReducedState::new(sig.sigma0 as f64 * speed, 0.0, angles[1..].to_vec());
            let eigenvalues = closed_form_jacobian(params, energy, &sig).diagonal().as_slice().to_vec();
            let stability = classify_stability(&eigenvalues)?;
            Ok(EquilibriumPoint {
                physical: sig.is_physical(),
                signature: sig,
                state,
                eigenvalues,
                stability,
            })
        })
        .collect()
}

/// Largest absolute component of the reduced vector field at `state`.
pub fn vector_field_residual(params: &VehicleParams, state: &ReducedState) -> Result<f64> {
    let d = reduced_vector_field(params, state)?;
    Ok(d.to_vec().iter().fold(0.0, |m: f64, v| m.max(v.abs())))
}

/// Jacobian of the torus-restricted flow at an equilibrium on the level
/// `energy`, from the closed form. The point is checked first. Its state
/// must lie on the level and zero the vector field with the given signature.
pub fn linearize_on_torus(
    params: &VehicleParams,
    energy: f64,
    point: &EquilibriumPoint,
) -> Result<DMatrix<f64>> {
    check_positive_offset(params, energy)?;
    point.state.check(params)?;
    Error::check_dim(params.trailers, point.signature.trailers())?;

    let angles = point.signature.angles();
    let mut y = vec![0.0; angles.len()];
    y[0] = angles[0];
    y[1..].copy_from_slice(&point.state.alpha);
    let mut dy = vec![0.0; y.len()];
    torus_rhs(params, energy, &y, &mut dy);
    let mut residual = dy.iter().fold(0.0, |m: f64, v| m.max(v.abs()));

    let speed = cruise_speed(params, energy);
    residual = residual
        .max(vector_field_residual(params, &point.state)?)
        .max((point.state.u - point.signature.sigma0 as f64 * speed).abs())
        .max(point.state.omega.abs())
        .max((energy_unchecked(params, &point.state) - energy).abs() / energy);
    for (a, s) in point.state.alpha.iter().zip(&point.signature.sigma) {
        residual = residual.max((a.cos() - *s as f64).abs());
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::NotEquilibrium { residual });
    }
    Ok(closed_form_jacobian(params, energy, &point.signature))
}

/// Node or saddle from the signs of real eigenvalues.
pub fn classify_stability(eigenvalues: &[f64]) -> Result<Stability> {
    if eigenvalues.iter().any(|l| *l == 0.0 || !l.is_finite()) {
        return Err(Error::NonHyperbolic);
    }
    Ok(if eigenvalues.iter().all(|l| *l < 0.0) {
        Stability::StableNode
    } else if eigenvalues.iter().all(|l| *l > 0.0) {
        Stability::UnstableNode
    } else {
        Stability::Saddle
    })
}

/// A circular relative equilibrium of the `a = 0` system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularEquilibrium {
    pub state: ReducedState,
    /// Radius `|u0 / omega0|` of the circle traced by the leading axle.
    pub radius: f64,
    /// Largest absolute component of the reduced vector field at `state`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularEquilibria {
    /// `u0^2 - n l^2 omega0^2`; solutions exist iff this is non-negative.
    pub condition: f64,
    pub solutions: Vec<CircularEquilibrium>,
}

/// Equilibria of the `a = 0` system with speed `u0` and angular velocity
/// `omega0`: the principal branch `cos alpha_k >= 0` of
///
/// ```text
/// cos^2 alpha_k = (u0^2 - k l^2 w0^2) / (u0^2 - (k-1) l^2 w0^2)
/// sin alpha_k   = (l w0 / u0) / prod_{j<k} cos alpha_j
/// ```
///
/// which exists iff `n l^2 omega0^2 <= u0^2`. With no trailers any
/// `(u0, omega0)` is an equilibrium.
pub fn equilibria_a0(params: &VehicleParams, u0: f64, omega0: f64) -> Result<CircularEquilibria> {
    params.validate()?;
    if params.offset != 0.0 {
        return Err(Error::Precondition("a = 0".to_string()));
    }
    if omega0 == 0.0 || !omega0.is_finite() || !u0.is_finite() {
        return Err(Error::Precondition(
            "a finite speed and a finite nonzero angular velocity".to_string(),
        ));
    }
    let n = params.trailers;
    let lw2 = (params.link * omega0).powi(2);
    let u2 = u0 * u0;
    let condition = u2 - n as f64 * lw2;
    if condition < 0.0 {
        return Ok(CircularEquilibria {
            condition,
            solutions: Vec::new(),
        });
    }

    let sign = (params.link * omega0 / u0).signum();
    let alpha: Vec<f64> = (1..=n)
        .map(|k| {
            let den = u2 - (k - 1) as f64 * lw2;
            let cos2 = ((u2 - k as f64 * lw2) / den).max(0.0);
            let sin2 = (lw2 / den).min(1.0);
            (sign * sin2.sqrt()).atan2(cos2.sqrt())
        })
        .collect();
    let state = ReducedState::new(u0, omega0, alpha);
    let y = state.to_vec();
    let mut dy = vec![0.0; y.len()];
    reduced_rhs(params, &y, &mut dy);
    let residual = dy.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok(CircularEquilibria {
        condition,
        solutions: vec![CircularEquilibrium {
            state,
            radius: (u0 / omega0).abs(),
            residual,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures_are_ordered_and_complete() {
        let all = EquilibriumSignature::all(2);
        assert_eq!(all.len(), 8);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0].to_string(), "(-,-,-)");
        assert_eq!(all[7].to_string(), "(+,+,+)");
    }

    #[test]
    fn rejects_bad_signature() {
        assert!(EquilibriumSignature::new(0, vec![1]).is_err());
        assert!(EquilibriumSignature::new(1, vec![1, -2]).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(classify_stability(&[-1.0, -2.0]).unwrap(), Stability::StableNode);
        assert_eq!(classify_stability(&[1.0, 2.0]).unwrap(), Stability::UnstableNode);
        assert_eq!(classify_stability(&[1.0, -2.0]).unwrap(), Stability::Saddle);
        assert!(matches!(classify_stability(&[0.0, -1.0]), Err(Error::NonHyperbolic)));
    }

    #[test]
    fn requires_offset() {
        let p = VehicleParams::default().with_offset(0.0);
        assert!(enumerate_equilibria(&p, 1.0).is_err());
        assert!(enumerate_equilibria(&VehicleParams::default(), 0.0).is_err());
    }

    #[test]
    fn perturbed_point_is_rejected() {
        let p = VehicleParams::default();
        let mut pt = enumerate_equilibria(&p, 1.0).unwrap().remove(3);
        assert!(linearize_on_torus(&p, 1.0, &pt).is_ok());
        pt.state.alpha[0] += 1e-3;
        assert!(matches!(
            linearize_on_torus(&p, 1.0, &pt),
            Err(Error::NotEquilibrium { .. })
        ));
    }

    #[test]
    fn sleigh_without_offset_always_balances() {
        let p = VehicleParams::default().with_offset(0.0).with_trailers(0);
        let eq = equilibria_a0(&p, 0.0, 3.0).unwrap();
        assert_eq!(eq.solutions.len(), 1);
        assert_eq!(eq.solutions[0].residual, 0.0);
    }

    #[test]
    fn point_json_shape() {
        let p = VehicleParams::default();
        let pts = enumerate_equilibria(&p, 1.0).unwrap();
        let v = serde_json::to_value(&pts[3]).unwrap();
        assert_eq!(v["stability"], "stable_node");
        assert_eq!(v["physical"], true);
        assert_eq!(v["signature"]["sigma"], serde_json::json!([1]));
    }
}
