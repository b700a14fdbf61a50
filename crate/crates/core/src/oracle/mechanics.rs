//! The unreduced mechanical system on `Q = SE(2) x T^n` in coordinates
//! `q = (x, y, theta, alpha_1, ..., alpha_n)`: kinetic-energy metric,
//! wheel constraints and a basis of the constraint distribution.
//!
//! Nothing here uses the closed-form reduced coefficients. Formulas are
//! written once, generically over [`Scalar`], so that exact derivatives come
//! from evaluating them on dual numbers.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FullState, VehicleParams};
use crate::oracle::dual::{Dual, Scalar, MAXD};

pub(crate) fn check_config(params: &VehicleParams, q: &FullState) -> Result<()> {
    params.validate()?;
    Error::check_dim(params.trailers, q.alpha.len())?;
    if params.trailers + 3 > MAXD {
        return Err(Error::Precondition(format!(
            "at most {} trailers for the oracle, got {}",
            MAXD - 3,
            params.trailers
        )));
    }
    Ok(())
}

/// Headings `theta_0 = theta` and `theta_i = theta - sum_{j<=i} alpha_j`.
pub(crate) fn headings<S: Scalar>(q: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(q.len() - 2);
    let mut th = q[2];
    out.push(th);
    for a in &q[3..] {
        th = th - *a;
        out.push(th);
    }
    out
}

/// Matrix `T` with `(xdot, ydot, thetadot, theta_1dot, ...) = T qdot`.
fn heading_map(n: usize) -> DMatrix<f64> {
    let dim = n + 3;
    let mut t = DMatrix::identity(dim, dim);
    for i in 1..=n {
        t[(2 + i, 2 + i)] = 0.0;
        t[(2 + i, 2)] = 1.0;
        for j in 1..=i {
            t[(2 + i, 2 + j)] = -1.0;
        }
    }
    t
}

/// Kinetic-energy metric in the heading coordinates
/// `(x, y, theta, theta_1, ..., theta_n)`.
fn heading_metric<S: Scalar>(p: &VehicleParams, th: &[S]) -> Vec<Vec<S>> {
    let n = th.len() - 1;
    let dim = n + 3;
    let l = p.link;
    let (mm, m, a) = (p.car_mass, p.trailer_mass, p.offset);
    let zero = S::cst(0.0);
    let mut g = vec![vec![zero; dim]; dim];
    let mut set = |i: usize, j: usize, v: S| {
        g[i][j] = v;
        g[j][i] = v;
    };
    set(0, 0, S::cst(mm + n as f64 * m));
    set(1, 1, S::cst(mm + n as f64 * m));
    set(2, 2, S::cst(p.car_inertia + mm * a * a));
    set(2, 0, -th[0].sin() * (mm * a));
    set(2, 1, th[0].cos() * (mm * a));
    for j in 1..=n {
        let w = (n + 1 - j) as f64;
        set(2 + j, 0, th[j].sin() * (m * l * w));
        set(2 + j, 1, -th[j].cos() * (m * l * w));
        set(2 + j, 2 + j, S::cst(p.trailer_inertia + w * m * l * l));
        for k in 1..j {
            set(2 + k, 2 + j, (th[k] - th[j]).cos() * (m * l * l * w));
        }
    }
    g
}

/// Metric in the `q` coordinates, `T^T G_theta T`.
pub(crate) fn metric<S: Scalar>(p: &VehicleParams, q: &[S]) -> Vec<Vec<S>> {
    let dim = q.len();
    let gt = heading_metric(p, &headings(q));
    let t = heading_map(dim - 3);
    let zero = S::cst(0.0);
    let mut gt_t = vec![vec![zero; dim]; dim];
    for i in 0..dim {
        for b in 0..dim {
            let mut acc = zero;
            for j in 0..dim {
                if t[(j, b)] != 0.0 {
                    acc = acc + gt[i][j] * t[(j, b)];
                }
            }
            gt_t[i][b] = acc;
        }
    }
    let mut g = vec![vec![zero; dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let mut acc = zero;
            for i in 0..dim {
                if t[(i, a)] != 0.0 {
                    acc = acc + gt_t[i][b] * t[(i, a)];
                }
            }
            g[a][b] = acc;
        }
    }
    g
}

/// Kinetic-energy metric `G(q)` with `L = qdot^T G qdot / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassMatrix(pub DMatrix<f64>);

impl MassMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `qdot^T G qdot / 2`.
    pub fn kinetic_energy(&self, qdot: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(qdot);
        0.5 * v.dot(&(&self.0 * &v))
    }

    /// Largest `|G_ij - G_ji|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.0 - self.0.transpose()).amax()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.clone().cholesky().is_some()
    }
}

pub fn mass_matrix(params: &VehicleParams, q: &FullState) -> Result<MassMatrix> {
    check_config(params, q)?;
    let g = metric(params, &q.to_vec());
    let dim = g.len();
    Ok(MassMatrix(DMatrix::from_fn(dim, dim, |i, j| g[i][j])))
}

/// The Lagrangian (pure kinetic energy) written out term by term in the
/// heading coordinates.
pub fn lagrangian(params: &VehicleParams, q: &FullState, qdot: &[f64]) -> Result<f64> {
    check_config(params, q)?;
    Error::check_dim(params.config_dim(), qdot.len())?;
    let n = params.trailers;
    let (l, m, mm, a) = (params.link, params.trailer_mass, params.car_mass, params.offset);
    let th = headings(&q.to_vec());
    let (xd, yd, td) = (qdot[0], qdot[1], qdot[2]);
    let mut thd = vec![td];
    for i in 1..=n {
        thd.push(thd[i - 1] - qdot[2 + i]);
    }

    let mut twice = (params.car_inertia + mm * a * a) * td * td
        + (mm + n as f64 * m) * (xd * xd + yd * yd)
        + 2.0 * mm * a * td * (yd * th[0].cos() - xd * th[0].sin());
    for j in 1..=n {
        let w = (n + 1 - j) as f64;
        twice += 2.0 * m * l * w * thd[j] * (xd * th[j].sin() - yd * th[j].cos());
        twice += (params.trailer_inertia + w * m * l * l) * thd[j] * thd[j];
        for k in 1..j {
            twice += 2.0 * m * l * l * w * thd[k] * thd[j] * (th[k] - th[j]).cos();
        }
    }
    Ok(0.5 * twice)
}

/// Poses `(x, y, heading)` of each body's centre of mass: the car first,
/// then the trailers in order.
pub(crate) fn body_poses<S: Scalar>(p: &VehicleParams, q: &[S]) -> Vec<(S, S, S)> {
    let th = headings(q);
    let (x, y) = (q[0], q[1]);
    let mut out = vec![(x + th[0].cos() * p.offset, y + th[0].sin() * p.offset, th[0])];
    let (mut xi, mut yi) = (x, y);
    for t in &th[1..] {
        xi = xi - t.cos() * p.link;
        yi = yi - t.sin() * p.link;
        out.push((xi, yi, *t));
    }
    out
}

/// Per-body velocities `(xdot, ydot, headingdot)` along `qdot`.
pub(crate) fn body_velocities(p: &VehicleParams, q: &[f64], qdot: &[f64]) -> Vec<[f64; 3]> {
    let poses = body_poses(p, &Dual::vars(q));
    let dir = |d: &Dual| d.d.iter().zip(qdot).map(|(a, b)| a * b).sum::<f64>();
    poses.iter().map(|(x, y, t)| [dir(x), dir(y), dir(t)]).collect()
}

/// Metric assembled body by body as `sum_b m_b J_b^T J_b + I_b grad(heading_b)^T grad(heading_b)`.
pub fn bodies_mass_matrix(params: &VehicleParams, q: &FullState) -> Result<MassMatrix> {
    check_config(params, q)?;
    let qv = q.to_vec();
    let dim = qv.len();
    let poses = body_poses(params, &Dual::vars(&qv));
    let mut g = DMatrix::zeros(dim, dim);
    for (b, (x, y, t)) in poses.iter().enumerate() {
        let (mass, inertia) = if b == 0 {
            (params.car_mass, params.car_inertia)
        } else {
            (params.trailer_mass, params.trailer_inertia)
        };
        for i in 0..dim {
            for j in 0..dim {
                g[(i, j)] += mass * (x.d[i] * x.d[j] + y.d[i] * y.d[j]) + inertia * t.d[i] * t.d[j];
            }
        }
    }
    Ok(MassMatrix(g))
}

/// Wheel constraints `xdot sin theta_i - ydot cos theta_i + l sum_{j=1}^i cos(theta_i - theta_j) theta_jdot`,
/// `i = 0..=n`, evaluated on `qdot`.
pub fn constraint_residuals(params: &VehicleParams, q: &FullState, qdot: &[f64]) -> Result<Vec<f64>> {
    check_config(params, q)?;
    Error::check_dim(params.config_dim(), qdot.len())?;
    let th = headings(&q.to_vec());
    let n = params.trailers;
    let mut thd = vec![qdot[2]];
    for i in 1..=n {
        thd.push(thd[i - 1] - qdot[2 + i]);
    }
    Ok((0..=n)
        .map(|i| {
            let hitch: f64 = (1..=i).map(|j| (th[i] - th[j]).cos() * thd[j]).sum();
            qdot[0] * th[i].sin() - qdot[1] * th[i].cos() + params.link * hitch
        })
        .collect())
}

/// Lifts a velocity `(xdot, ydot, thetadot)` of the leading car to the
/// unique `qdot` satisfying every wheel constraint, by solving the
/// constraints one trailer at a time.
fn lift_car_velocity<S: Scalar>(p: &VehicleParams, q: &[S], car: [S; 3]) -> Vec<S> {
    let th = headings(q);
    let n = th.len() - 1;
    let mut thd = vec![car[2]];
    for i in 1..=n {
        let mut rest = car[0] * th[i].sin() - car[1] * th[i].cos();
        for j in 1..i {
            rest = rest + (th[i] - th[j]).cos() * thd[j] * p.link;
        }
        thd.push(-rest / S::cst(p.link));
    }
    let mut out = car.to_vec();
    for i in 1..=n {
        out.push(thd[i - 1] - thd[i]);
    }
    out
}

/// `Z_1` (unit forward speed) and `Z_2` (unit turning rate) at `q`.
pub(crate) fn z_fields<S: Scalar>(p: &VehicleParams, q: &[S]) -> [Vec<S>; 2] {
    let (zero, one) = (S::cst(0.0), S::cst(1.0));
    [
        lift_car_velocity(p, q, [q[2].cos(), q[2].sin(), zero]),
        lift_car_velocity(p, q, [zero, zero, one]),
    ]
}

/// Components of the constraint distribution basis at a configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionBasis {
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
}

pub fn distribution_basis(params: &VehicleParams, q: &FullState) -> Result<DistributionBasis> {
    check_config(params, q)?;
    let [z1, z2] = z_fields(params, &q.to_vec());
    Ok(DistributionBasis { z1, z2 })
}
