use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::coeffs::{r_value, Angles};
use crate::model::{ReducedState, VehicleParams};

/// Kinetic energy of the reduced state, `(R(alpha) u^2 + (J0 + M a^2) omega^2) / 2`.
pub fn energy(params: &VehicleParams, state: &ReducedState) -> Result<f64> {
    state.check(params)?;
    Ok(energy_unchecked(params, state))
}

pub(crate) fn energy_unchecked(params: &VehicleParams, state: &ReducedState) -> f64 {
    let r = r_value(params, &Angles::new(&state.alpha));
    0.5 * (r * state.u * state.u + params.car_axle_inertia() * state.omega * state.omega)
}

/// Coordinates `(beta, alpha)` on the energy level `E`, an `(n+1)`-torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusCoords {
    pub energy: f64,
    pub beta: f64,
    pub alpha: Vec<f64>,
}

impl TorusCoords {
    pub fn new(energy: f64, beta: f64, alpha: Vec<f64>) -> Self {
        TorusCoords {
            energy,
            beta,
            alpha,
        }
    }

    /// Angles `[beta, alpha_1, ..., alpha_n]` as a flat vector.
    pub fn angles(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.alpha.len() + 1);
        v.push(self.beta);
        v.extend_from_slice(&self.alpha);
        v
    }

    pub fn from_angles(energy: f64, angles: &[f64]) -> Self {
        TorusCoords::new(energy, angles[0], angles[1..].to_vec())
    }
}

/// `u = sqrt(2E/R(alpha)) cos beta`, `omega = sqrt(2E/(J0 + M a^2)) sin beta`.
pub fn torus_embed(params: &VehicleParams, coords: &TorusCoords) -> Result<ReducedState> {
    Error::check_dim(params.trailers, coords.alpha.len())?;
    if !(coords.energy > 0.0) {
        return Err(Error::NonPositiveEnergy(coords.energy));
    }
    let r = r_value(params, &Angles::new(&coords.alpha));
    let two_e = 2.0 * coords.energy;
    let (sb, cb) = coords.beta.sin_cos();
    Ok(ReducedState::new(
        (two_e / r).sqrt() * cb,
        (two_e / params.car_axle_inertia()).sqrt() * sb,
        coords.alpha.clone(),
    ))
}

/// Inverse of [`torus_embed`]; `beta` is returned in `(-pi, pi]`.
pub fn torus_project(params: &VehicleParams, state: &ReducedState) -> Result<TorusCoords> {
    state.check(params)?;
    let e = energy_unchecked(params, state);
    if !(e > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    let r = r_value(params, &Angles::new(&state.alpha));
    let c = state.u * r.sqrt();
    let s = state.omega * params.car_axle_inertia().sqrt();
    Ok(TorusCoords::new(e, s.atan2(c), state.alpha.clone()))
}
