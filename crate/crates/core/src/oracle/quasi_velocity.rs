//! Reduced equations generated from first principles with the
//! quasi-velocity form of the Lagrange-d'Alembert equations:
//!
//! ```text
//! d/dt (dL_c/dv^b) = -C_bd^e v^d dL_c/dv^e + rho_b^i dL_c/dq^i
//! ```
//!
//! where `L_c(q, v) = v^T K(q) v / 2` is the Lagrangian restricted to the
//! constraint distribution with `K_ab = G(Z_a, Z_b)`. The `C_bd^e` are the
//! components of the `G`-orthogonal projection of `[Z_b, Z_d]` onto the
//! distribution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FullState, Pose, ReducedState, VehicleParams};
use crate::oracle::dual::{Dual, Scalar};
use crate::oracle::mechanics::{body_velocities, check_config, metric, z_fields};

fn bilinear<S: Scalar>(g: &[Vec<S>], v: &[S], w: &[S]) -> S {
    let mut acc = S::cst(0.0);
    for (gi, vi) in g.iter().zip(v) {
        let mut row = S::cst(0.0);
        for (gij, wj) in gi.iter().zip(w) {
            row = row + *gij * *wj;
        }
        acc = acc + *vi * row;
    }
    acc
}

fn gram<S: Scalar>(g: &[Vec<S>], z: &[Vec<S>; 2]) -> [[S; 2]; 2] {
    let k01 = bilinear(g, &z[0], &z[1]);
    [
        [bilinear(g, &z[0], &z[0]), k01],
        [k01, bilinear(g, &z[1], &z[1])],
    ]
}

fn solve2(k: &[[f64; 2]; 2], b: [f64; 2]) -> Result<[f64; 2]> {
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let scale = k[0][0].abs().max(k[1][1].abs()).powi(2);
    if !(det.abs() > 1e-14 * scale) {
        return Err(Error::Precondition(
            "a nonsingular Gram matrix of the distribution basis".to_string(),
        ));
    }
    Ok([
        (k[1][1] * b[0] - k[0][1] * b[1]) / det,
        (k[0][0] * b[1] - k[1][0] * b[0]) / det,
    ])
}

fn values(v: &[f64; 2], z: &[Vec<f64>; 2]) -> Vec<f64> {
    z[0].iter().zip(&z[1]).map(|(a, b)| v[0] * a + v[1] * b).collect()
}

/// Components `c` of the `G`-orthogonal projection `c^b Z_b` of `w`.
fn project_coords(p: &VehicleParams, q: &[f64], w: &[f64]) -> Result<[f64; 2]> {
    let g = metric(p, q);
    let z = z_fields(p, q);
    let k = gram(&g, &z);
    solve2(&k, [bilinear(&g, &z[0], w), bilinear(&g, &z[1], w)])
}

/// `G`-orthogonal projection of the tangent vector `v` at `q` onto the
/// constraint distribution.
pub fn orthogonal_project(params: &VehicleParams, q: &FullState, v: &[f64]) -> Result<Vec<f64>> {
    check_config(params, q)?;
    Error::check_dim(params.config_dim(), v.len())?;
    let qv = q.to_vec();
    let c = project_coords(params, &qv, v)?;
    Ok(values(&c, &z_fields(params, &qv)))
}

/// Jacobians `dZ_b^i / dq^j` by forward-mode differentiation.
fn z_jacobians(p: &VehicleParams, q: &[f64]) -> [Vec<Dual>; 2] {
    z_fields(p, &Dual::vars(q))
}

fn bracket_from(x: &[Dual], y: &[Dual]) -> Vec<f64> {
    let dim = x.len();
    (0..dim)
        .map(|i| (0..dim).map(|j| x[j].v * y[i].d[j] - y[j].v * x[i].d[j]).sum())
        .collect()
}

/// The commutator `[Z_1, Z_2]` at `q`.
pub fn lie_bracket(params: &VehicleParams, q: &FullState) -> Result<Vec<f64>> {
    check_config(params, q)?;
    let [z1, z2] = z_jacobians(params, &q.to_vec());
    Ok(bracket_from(&z1, &z2))
}

/// `(C_12^1, C_12^2)`: components of the projected commutator
/// `P[Z_1, Z_2] = C_12^1 Z_1 + C_12^2 Z_2`.
pub fn structure_coefficients(params: &VehicleParams, q: &FullState) -> Result<(f64, f64)> {
    check_config(params, q)?;
    let qv = q.to_vec();
    let [z1, z2] = z_jacobians(params, &qv);
    let c = project_coords(params, &qv, &bracket_from(&z1, &z2))?;
    Ok((c[0], c[1]))
}

/// The quasi-velocity system assembled at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedSystem {
    /// `K_ab = G(Z_a, Z_b)`.
    pub gram: [[f64; 2]; 2],
    pub c1_12: f64,
    pub c2_12: f64,
    /// `(u', omega', alpha')`.
    pub rhs: ReducedState,
}

/// Assembles the quasi-velocity equations at the configuration `q` with
/// quasi-velocities `(u, omega)`.
pub fn generated_system(
    params: &VehicleParams,
    q: &FullState,
    u: f64,
    omega: f64,
) -> Result<GeneratedSystem> {
    check_config(params, q)?;
    let qv = q.to_vec();
    let dim = qv.len();
    let qd = Dual::vars(&qv);

    let zd = z_fields(params, &qd);
    let gd = metric(params, &qd);
    let kd = gram(&gd, &zd);
    let k = [[kd[0][0].v, kd[0][1].v], [kd[1][0].v, kd[1][1].v]];
    let z = [
        zd[0].iter().map(|c| c.v).collect::<Vec<_>>(),
        zd[1].iter().map(|c| c.v).collect::<Vec<_>>(),
    ];
    let v = [u, omega];
    let qdot = values(&v, &z);

    let commutator = bracket_from(&zd[0], &zd[1]);
    let c12 = project_coords(params, &qv, &commutator)?;

    // dL_c/dq^i = v^T (dK/dq^i) v / 2 and dK/dt = (dK/dq^i) qdot^i.
    let dk = |i: usize| [[kd[0][0].d[i], kd[0][1].d[i]], [kd[1][0].d[i], kd[1][1].d[i]]];
    let quad = |m: &[[f64; 2]; 2]| {
        v[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + v[1] * (m[1][0] * v[0] + m[1][1] * v[1])
    };
    let dl_dq: Vec<f64> = (0..dim).map(|i| 0.5 * quad(&dk(i))).collect();
    let mut kdot = [[0.0; 2]; 2];
    for (i, qdi) in qdot.iter().enumerate() {
        let d = dk(i);
        for a in 0..2 {
            for b in 0..2 {
                kdot[a][b] += d[a][b] * qdi;
            }
        }
    }

    let momentum = [k[0][0] * u + k[0][1] * omega, k[1][0] * u + k[1][1] * omega];
    let c_dot_p = c12[0] * momentum[0] + c12[1] * momentum[1];
    // C_12 = -C_21 and C_11 = C_22 = 0.
    let constraint_force = [-omega * c_dot_p, u * c_dot_p];
    let mut rhs = [0.0; 2];
    for b in 0..2 {
        let shape: f64 = z[b].iter().zip(&dl_dq).map(|(r, d)| r * d).sum();
        rhs[b] = constraint_force[b] + shape
            - (kdot[b][0] * v[0] + kdot[b][1] * v[1]);
    }
    let vdot = solve2(&k, rhs)?;

    Ok(GeneratedSystem {
        gram: k,
        c1_12: c12[0],
        c2_12: c12[1],
        rhs: ReducedState::new(vdot[0], vdot[1], qdot[3..].to_vec()),
    })
}

/// Generated reduced vector field, evaluated with the leading car at the
/// origin facing the `x` axis.
pub fn generated_rhs(params: &VehicleParams, state: &ReducedState) -> Result<ReducedState> {
    generated_rhs_at(params, Pose::default(), state)
}

/// Generated reduced vector field with the leading car at `pose`.
pub fn generated_rhs_at(
    params: &VehicleParams,
    pose: Pose,
    state: &ReducedState,
) -> Result<ReducedState> {
    let q = FullState::new(pose, state.alpha.clone());
    Ok(generated_system(params, &q, state.u, state.omega)?.rhs)
}

fn constrained_velocities(params: &VehicleParams, state: &ReducedState) -> Result<Vec<[f64; 3]>> {
    let q = FullState::new(Pose::default(), state.alpha.clone());
    check_config(params, &q)?;
    let qv = q.to_vec();
    let z = z_fields(params, &qv);
    let qdot = values(&[state.u, state.omega], &z);
    Ok(body_velocities(params, &qv, &qdot))
}

/// For each trailer `j`, `xdot_j^2 + ydot_j^2 - u^2 prod_{k<=j} cos^2 alpha_k`
/// with the hitch velocities computed from the body positions.
pub fn trailer_speed_check(params: &VehicleParams, state: &ReducedState) -> Result<Vec<f64>> {
    let vel = constrained_velocities(params, state)?;
    // Body 0 is the car's centre of mass; trailer hitch points follow.
    let mut prod = 1.0;
    Ok(vel[1..]
        .iter()
        .zip(&state.alpha)
        .map(|(v, a)| {
            prod *= a.cos().powi(2);
            v[0] * v[0] + v[1] * v[1] - state.u * state.u * prod
        })
        .collect())
}

/// Kinetic energy summed body by body along the constrained velocity.
pub fn constrained_lagrangian_from_bodies(
    params: &VehicleParams,
    state: &ReducedState,
) -> Result<f64> {
    let vel = constrained_velocities(params, state)?;
    Ok(vel
        .iter()
        .enumerate()
        .map(|(b, v)| {
            let (mass, inertia) = if b == 0 {
                (params.car_mass, params.car_inertia)
            } else {
                (params.trailer_mass, params.trailer_inertia)
            };
            0.5 * (mass * (v[0] * v[0] + v[1] * v[1]) + inertia * v[2] * v[2])
        })
        .sum())
}
