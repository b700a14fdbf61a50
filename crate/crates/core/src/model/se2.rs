use serde::{Deserialize, Serialize};

use crate::model::FullState;

/// Rigid motion of the plane: rotation by `phi` followed by translation `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Se2 {
    pub phi: f64,
    pub r: f64,
    pub s: f64,
}

impl Se2 {
    pub fn new(phi: f64, r: f64, s: f64) -> Self {
        Se2 { phi, r, s }
    }

    pub fn identity() -> Self {
        Se2::default()
    }

    pub fn apply_point(&self, x: f64, y: f64) -> (f64, f64) {
        let (sp, cp) = self.phi.sin_cos();
        (cp * x - sp * y + self.r, sp * x + cp * y + self.s)
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Se2) -> Se2 {
        let (r, s) = self.apply_point(other.r, other.s);
        Se2::new(self.phi + other.phi, r, s)
    }

    pub fn inverse(&self) -> Se2 {
        let (sp, cp) = self.phi.sin_cos();
        Se2::new(
            -self.phi,
            -(cp * self.r + sp * self.s),
            sp * self.r - cp * self.s,
        )
    }

    /// Tangent lift of the action on configuration velocities
    /// `(xdot, ydot, thetadot, alphadot...)`.
    pub fn apply_velocity(&self, qdot: &[f64]) -> Vec<f64> {
        let (sp, cp) = self.phi.sin_cos();
        let mut v = qdot.to_vec();
        v[0] = cp * qdot[0] - sp * qdot[1];
        v[1] = sp * qdot[0] + cp * qdot[1];
        v
    }
}

/// Action on `Q`: every heading shifts by `phi`, so the relative angles
/// are unchanged.
pub fn apply_se2(g: &Se2, q: &FullState) -> FullState {
    let (x, y) = g.apply_point(q.x, q.y);
    FullState {
        x,
        y,
        theta: q.theta + g.phi,
        alpha: q.alpha.clone(),
    }
}
