use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::VehicleParams;

/// Maps an angle to `(-pi, pi]`.
pub fn wrap(angle: f64) -> f64 {
    let r = angle.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// State of the SE(2)-reduced system: longitudinal speed `u`, heading rate
/// `omega` and the relative angles `alpha[0..n]` (alpha_1 ... alpha_n).
///
/// Angles are stored unwrapped. Serializes as the flat array
/// `[u, omega, alpha_1, ..., alpha_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ReducedState {
    pub u: f64,
    pub omega: f64,
    pub alpha: Vec<f64>,
}

impl ReducedState {
    pub fn new(u: f64, omega: f64, alpha: Vec<f64>) -> Self {
        ReducedState { u, omega, alpha }
    }

    /// The zero-velocity state with all trailers aligned.
    pub fn rest(n: usize) -> Self {
        ReducedState::new(0.0, 0.0, vec![0.0; n])
    }

    pub fn check(&self, params: &VehicleParams) -> Result<()> {
        Error::check_dim(params.trailers, self.alpha.len())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.alpha.len() + 2);
        v.push(self.u);
        v.push(self.omega);
        v.extend_from_slice(&self.alpha);
        v
    }

    /// Inverse of [`ReducedState::to_vec`]; panics on slices shorter than 2.
    pub fn from_slice(v: &[f64]) -> Self {
        ReducedState::new(v[0], v[1], v[2..].to_vec())
    }

    /// Copy with every angle mapped to `(-pi, pi]`.
    pub fn wrapped(&self) -> Self {
        ReducedState::new(self.u, self.omega, self.alpha.iter().map(|&a| wrap(a)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.omega.is_finite() && self.alpha.iter().all(|a| a.is_finite())
    }
}

impl TryFrom<Vec<f64>> for ReducedState {
    type Error = String;

    fn try_from(v: Vec<f64>) -> std::result::Result<Self, String> {
        if v.len() < 2 {
            return Err(format!(
                "reduced state needs at least [u, omega], got {} values",
                v.len()
            ));
        }
        Ok(ReducedState::from_slice(&v))
    }
}

impl From<ReducedState> for Vec<f64> {
    fn from(s: ReducedState) -> Self {
        s.to_vec()
    }
}

/// Planar pose `(x, y, theta)` of the leading car's axle midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose { x, y, theta }
    }
}

impl From<[f64; 3]> for Pose {
    fn from(v: [f64; 3]) -> Self {
        Pose::new(v[0], v[1], v[2])
    }
}

impl From<Pose> for [f64; 3] {
    fn from(p: Pose) -> Self {
        [p.x, p.y, p.theta]
    }
}

/// Configuration on `Q = SE(2) x T^n` in the coordinates
/// `(x, y, theta, alpha_1, ..., alpha_n)`.
///
/// Trailer headings and axle positions are derived on demand.
/// Serializes as `[x, y, theta, alpha_1, ..., alpha_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FullState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub alpha: Vec<f64>,
}

impl FullState {
    pub fn new(pose: Pose, alpha: Vec<f64>) -> Self {
        FullState {
            x: pose.x,
            y: pose.y,
            theta: pose.theta,
            alpha,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.theta)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.x, self.y, self.theta];
        v.extend_from_slice(&self.alpha);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        FullState {
            x: v[0],
            y: v[1],
            theta: v[2],
            alpha: v[3..].to_vec(),
        }
    }

    /// Headings `theta_1 ... theta_n`, with `theta_i = theta - sum_{j<=i} alpha_j`.
    pub fn trailer_headings(&self) -> Vec<f64> {
        let mut acc = self.theta;
        self.alpha
            .iter()
            .map(|a| {
                acc -= a;
                acc
            })
            .collect()
    }

    /// Axle midpoints of the trailers, each one link behind its predecessor.
    pub fn trailer_positions(&self, params: &VehicleParams) -> Vec<(f64, f64)> {
        let (mut x, mut y) = (self.x, self.y);
        self.trailer_headings()
            .into_iter()
            .map(|th| {
                x -= params.link * th.cos();
                y -= params.link * th.sin();
                (x, y)
            })
            .collect()
    }
}

impl TryFrom<Vec<f64>> for FullState {
    type Error = String;

    fn try_from(v: Vec<f64>) -> std::result::Result<Self, String> {
        if v.len() < 3 {
            return Err(format!(
                "configuration needs at least [x, y, theta], got {} values",
                v.len()
            ));
        }
        Ok(FullState::from_slice(&v))
    }
}

impl From<FullState> for Vec<f64> {
    fn from(s: FullState) -> Self {
        s.to_vec()
    }
}

/// Velocity of the reduced state lifted to `TQ` at `q`: the components
/// `(xdot, ydot, thetadot, alphadot_1, ..., alphadot_n)`.
pub fn lift_velocity(q: &FullState, u: f64, omega: f64, alpha_dot: &[f64]) -> Vec<f64> {
    let mut v = vec![u * q.theta.cos(), u * q.theta.sin(), omega];
    v.extend_from_slice(alpha_dot);
    v
}

/// Recovers `(u, omega)` from a configuration velocity.
pub fn reduced_velocity(q: &FullState, qdot: &[f64]) -> (f64, f64) {
    let u = qdot[0] * q.theta.cos() + qdot[1] * q.theta.sin();
    (u, qdot[2])
}
