use crate::error::{Error, Result};
use crate::model::{
    a_terms, grad_r_terms, q_value, r_value, torus_embed, Angles, ReducedState, TorusCoords,
    VehicleParams,
};
use crate::numerics::ode::OdeSystem;

/// Time derivative of the reduced state `(u, omega, alpha)`:
///
/// ```text
/// u'       = -(1/2R)(sum_k A_k dR/dalpha_k) u^2 + Q/(l^2 R) u omega + (M a/R) omega^2
/// omega'   = -M a u omega / (J0 + M a^2)
/// alpha_1' = omega - u sin(alpha_1)/l
/// alpha_k' = u A_k,  k >= 2
/// ```
pub fn reduced_vector_field(params: &VehicleParams, state: &ReducedState) -> Result<ReducedState> {
    state.check(params)?;
    let y = state.to_vec();
    let mut dy = vec![0.0; y.len()];
    reduced_rhs(params, &y, &mut dy);
    Ok(ReducedState::from_slice(&dy))
}

/// Flat-slice version of [`reduced_vector_field`]; `y = [u, omega, alpha...]`.
pub fn reduced_rhs(p: &VehicleParams, y: &[f64], dy: &mut [f64]) {
    let (u, w) = (y[0], y[1]);
    let ang = Angles::new(&y[2..]);
    let r = r_value(p, &ang);
    let a = a_terms(&ang, p.link);
    let grad = grad_r_terms(p, &ang);
    let q = q_value(p, &ang);
    let ma = p.car_mass * p.offset;
    let drift: f64 = a.iter().zip(&grad).map(|(ak, gk)| ak * gk).sum();

    dy[0] = -drift / (2.0 * r) * u * u + q / (p.link * p.link * r) * u * w + ma / r * w * w;
    dy[1] = -ma * u * w / p.car_axle_inertia();
    for (k, ak) in a.iter().enumerate() {
        dy[2 + k] = u * ak;
    }
    if !a.is_empty() {
        dy[2] += w;
    }
}

/// Flow restricted to the energy level `E`, in the torus angles
/// `(beta, alpha)`. Returns `[beta', alpha_1', ..., alpha_n']`.
pub fn torus_vector_field(params: &VehicleParams, coords: &TorusCoords) -> Result<Vec<f64>> {
    Error::check_dim(params.trailers, coords.alpha.len())?;
    if !(coords.energy > 0.0) {
        return Err(Error::NonPositiveEnergy(coords.energy));
    }
    let y = coords.angles();
    let mut dy = vec![0.0; y.len()];
    torus_rhs(params, coords.energy, &y, &mut dy);
    Ok(dy)
}

/// Flat-slice version of [`torus_vector_field`]; `y = [beta, alpha...]`.
pub fn torus_rhs(p: &VehicleParams, energy: f64, y: &[f64], dy: &mut [f64]) {
    let beta = y[0];
    let ang = Angles::new(&y[1..]);
    let r = r_value(p, &ang);
    let inertia = p.car_axle_inertia();
    let (sb, cb) = beta.sin_cos();
    let u = (2.0 * energy / r).sqrt() * cb;
    let w = (2.0 * energy / inertia).sqrt() * sb;

    dy[0] = -(p.car_mass * p.offset / inertia) * (2.0 * energy / r).sqrt() * sb;
    for (k, ak) in a_terms(&ang, p.link).iter().enumerate() {
        dy[1 + k] = u * ak;
    }
    if y.len() > 1 {
        dy[1] += w;
    }
}

/// Pushes a torus point forward to `(u, omega, alpha)`; see [`torus_embed`].
pub fn embed_angles(params: &VehicleParams, energy: f64, angles: &[f64]) -> Result<ReducedState> {
    torus_embed(params, &TorusCoords::from_angles(energy, angles))
}

/// The reduced equations as an [`OdeSystem`] on `[u, omega, alpha...]`.
#[derive(Debug, Clone, Copy)]
pub struct ReducedSystem<'a> {
    pub params: &'a VehicleParams,
}

impl OdeSystem for ReducedSystem<'_> {
    fn dim(&self) -> usize {
        self.params.trailers + 2
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        reduced_rhs(self.params, y, dy)
    }
}

/// Torus-restricted flow as an [`OdeSystem`] on `[beta, alpha...]`.
#[derive(Debug, Clone, Copy)]
pub struct TorusSystem<'a> {
    pub params: &'a VehicleParams,
    pub energy: f64,
}

impl OdeSystem for TorusSystem<'_> {
    fn dim(&self) -> usize {
        self.params.trailers + 1
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        torus_rhs(self.params, self.energy, y, dy)
    }
}

/// Reduced equations augmented with the leading car's pose:
/// `[u, omega, alpha..., x, y, theta]` with `x' = u cos theta`,
/// `y' = u sin theta`, `theta' = omega`.
#[derive(Debug, Clone, Copy)]
pub struct PlanarSystem<'a> {
    pub params: &'a VehicleParams,
}

impl OdeSystem for PlanarSystem<'_> {
    fn dim(&self) -> usize {
        self.params.trailers + 5
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let m = self.params.trailers + 2;
        reduced_rhs(self.params, &y[..m], &mut dy[..m]);
        let (u, w, theta) = (y[0], y[1], y[m + 2]);
        dy[m] = u * theta.cos();
        dy[m + 1] = u * theta.sin();
        dy[m + 2] = w;
    }
}
