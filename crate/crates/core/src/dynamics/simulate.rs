use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::fields::{reduced_rhs, PlanarSystem, ReducedSystem, TorusSystem};
use crate::error::{Error, Result};
use crate::model::{energy_unchecked, FullState, Pose, ReducedState, VehicleParams};
use crate::numerics::ode::{integrate, IntegratorConfig, OdeSolution, OdeSystem, Reversed};

/// Which times of an integration run end up in the returned trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum Sampling {
    /// Every accepted integrator step.
    Steps,
    /// `t0 + k dt` by dense output, plus the end point.
    Uniform { dt: f64 },
}

impl Sampling {
    pub(crate) fn times(&self, sol: &OdeSolution) -> Vec<f64> {
        match *self {
            Sampling::Steps => sol.t.clone(),
            Sampling::Uniform { dt } => {
                let (t0, t1) = (sol.t[0], sol.t_end());
                let mut out = Vec::new();
                let mut k = 0usize;
                loop {
                    let t = t0 + k as f64 * dt;
                    if t >= t1 - 1e-12 * dt {
                        break;
                    }
                    out.push(t);
                    k += 1;
                }
                out.push(t1);
                out
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    /// `max |E(t) - E(0)| / E(0)` over every accepted step (absolute when
    /// `E(0) = 0`).
    pub energy_drift: f64,
    /// `max |omega(t) - omega(0)|` over every accepted step.
    pub omega_drift: f64,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("empty trajectory")
    }
}

fn drifts(params: &VehicleParams, sol: &OdeSolution) -> (f64, f64) {
    let m = params.trailers + 2;
    let first = ReducedState::from_slice(&sol.y[0][..m]);
    let e0 = energy_unchecked(params, &first);
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let mut de: f64 = 0.0;
    let mut dw: f64 = 0.0;
    for y in &sol.y {
        let s = ReducedState::from_slice(&y[..m]);
        de = de.max((energy_unchecked(params, &s) - e0).abs() / scale);
        dw = dw.max((y[1] - first.omega).abs());
    }
    (de, dw)
}

fn run<S: OdeSystem>(
    system: &S,
    y0: &[f64],
    t_end: f64,
    reverse: bool,
    config: &IntegratorConfig,
) -> Result<OdeSolution> {
    let sol = if reverse {
        integrate(&Reversed(system), y0, 0.0, t_end, config)?
    } else {
        integrate(system, y0, 0.0, t_end, config)?
    };
    Ok(sol)
}

/// Integrates the reduced equations over `[0, t_end]` and returns both the
/// sampled trajectory and the raw step data (for dense output).
pub fn simulate_dense(
    params: &VehicleParams,
    initial: &ReducedState,
    t_end: f64,
    config: &IntegratorConfig,
    sampling: Sampling,
) -> Result<(Trajectory<ReducedState>, OdeSolution)> {
    params.validate()?;
    initial.check(params)?;
    let sol = run(&ReducedSystem { params }, &initial.to_vec(), t_end, false, config)?;
    let (energy_drift, omega_drift) = drifts(params, &sol);
    let times = sampling.times(&sol);
    let states = match sampling {
        Sampling::Steps => sol.y.iter().map(|y| ReducedState::from_slice(y)).collect(),
        Sampling::Uniform { .. } => times
            .iter()
            .map(|&t| ReducedState::from_slice(&sol.interpolate(t)))
            .collect(),
    };
    Ok((
        Trajectory {
            times,
            states,
            energy_drift,
            omega_drift,
        },
        sol,
    ))
}

/// Integrates the reduced equations over `[0, t_end]`.
pub fn simulate(
    params: &VehicleParams,
    initial: &ReducedState,
    t_end: f64,
    config: &IntegratorConfig,
    sampling: Sampling,
) -> Result<Trajectory<ReducedState>> {
    simulate_dense(params, initial, t_end, config, sampling).map(|(traj, _)| traj)
}

/// Integrates the torus-restricted flow on the level `energy`; states are
/// `[beta, alpha...]`. With `reverse` the flow is run backwards in time and
/// the returned times are the elapsed (positive) durations.
pub fn simulate_torus(
    params: &VehicleParams,
    energy: f64,
    angles: &[f64],
    t_end: f64,
    reverse: bool,
    config: &IntegratorConfig,
    sampling: Sampling,
) -> Result<Trajectory<Vec<f64>>> {
    Error::check_dim(params.trailers + 1, angles.len())?;
    if !(energy > 0.0) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let sol = run(&TorusSystem { params, energy }, angles, t_end, reverse, config)?;
    let times = sampling.times(&sol);
    let states = match sampling {
        Sampling::Steps => sol.y.clone(),
        Sampling::Uniform { .. } => times.iter().map(|&t| sol.interpolate(t)).collect(),
    };
    Ok(Trajectory {
        times,
        states,
        energy_drift: 0.0,
        omega_drift: 0.0,
    })
}

/// A reduced trajectory lifted to the plane.
#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    pub reduced: Trajectory<ReducedState>,
    pub configurations: Vec<FullState>,
    /// Per sample, the largest |wheel constraint residual| over all `n + 1` bodies.
    pub constraint_residuals: Vec<f64>,
    pub max_constraint_residual: f64,
}

/// Wheel constraint residuals `xdot_i sin theta_i - ydot_i cos theta_i`,
/// `i = 0..=n`, with the trailer velocities obtained by differentiating the
/// hitch relations along the reduced velocity.
pub fn wheel_residuals(params: &VehicleParams, q: &FullState, state: &ReducedState) -> Vec<f64> {
    let y = state.to_vec();
    let mut dy = vec![0.0; y.len()];
    reduced_rhs(params, &y, &mut dy);
    let alpha_dot = &dy[2..];
    let (u, w) = (state.u, state.omega);
    let mut xd = u * q.theta.cos();
    let mut yd = u * q.theta.sin();
    let mut out = Vec::with_capacity(params.trailers + 1);
    out.push(xd * q.theta.sin() - yd * q.theta.cos());

    let mut heading_rate = w;
    for (th, ad) in q.trailer_headings().iter().zip(alpha_dot) {
        heading_rate -= ad;
        xd += params.link * th.sin() * heading_rate;
        yd -= params.link * th.cos() * heading_rate;
        out.push(xd * th.sin() - yd * th.cos());
    }
    out
}

fn residual_summary(
    params: &VehicleParams,
    configurations: &[FullState],
    states: &[ReducedState],
) -> (Vec<f64>, f64) {
    let res: Vec<f64> = configurations
        .iter()
        .zip(states)
        .map(|(q, s)| {
            wheel_residuals(params, q, s)
                .into_iter()
                .fold(0.0, |m: f64, r| m.max(r.abs()))
        })
        .collect();
    let max = res.iter().cloned().fold(0.0, f64::max);
    (res, max)
}

// Gauss-Legendre nodes and weights on [0, 1].
const GL_NODES: [f64; 5] = [
    0.046_910_077_030_668_004,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL_WEIGHTS: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_45,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

/// Lifts a sampled reduced trajectory to the plane by integrating
/// `x' = u cos theta`, `y' = u sin theta`, `theta' = omega` from
/// `initial_pose`. Between samples `(u, omega)` are cubic Hermite
/// interpolants built from the vector field, so accuracy follows the
/// sample spacing; pass a step-sampled run for best results.
pub fn reconstruct(
    params: &VehicleParams,
    reduced: &Trajectory<ReducedState>,
    initial_pose: Pose,
) -> Result<Reconstruction> {
    if reduced.times.len() != reduced.states.len() || reduced.times.is_empty() {
        return Err(Error::Precondition(format!(
            "trajectory with matching time grid (got {} times, {} states)",
            reduced.times.len(),
            reduced.states.len()
        )));
    }
    if reduced.times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(
            "strictly increasing sample times".to_string(),
        ));
    }
    for s in &reduced.states {
        s.check(params)?;
    }

    let rates: Vec<Vec<f64>> = reduced
        .states
        .iter()
        .map(|s| {
            let y = s.to_vec();
            let mut dy = vec![0.0; y.len()];
            reduced_rhs(params, &y, &mut dy);
            dy
        })
        .collect();

    let mut pose = initial_pose;
    let mut configurations = Vec::with_capacity(reduced.len());
    configurations.push(FullState::new(pose, reduced.states[0].alpha.clone()));
    for i in 1..reduced.len() {
        let h = reduced.times[i] - reduced.times[i - 1];
        let (s0, s1) = (&reduced.states[i - 1], &reduced.states[i]);
        let (f0, f1) = (&rates[i - 1], &rates[i]);
        // Hermite basis on [0, 1] and its antiderivative from 0.
        let herm = |a0: f64, d0: f64, a1: f64, d1: f64, s: f64| {
            let (s2, s3) = (s * s, s * s * s);
            (2.0 * s3 - 3.0 * s2 + 1.0) * a0
                + h * (s3 - 2.0 * s2 + s) * d0
                + (-2.0 * s3 + 3.0 * s2) * a1
                + h * (s3 - s2) * d1
        };
        let herm_int = |a0: f64, d0: f64, a1: f64, d1: f64, s: f64| {
            let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
            h * ((s - s3 + 0.5 * s4) * a0
                + h * (0.5 * s2 - 2.0 * s3 / 3.0 + 0.25 * s4) * d0
                + (s3 - 0.5 * s4) * a1
                + h * (-s3 / 3.0 + 0.25 * s4) * d1)
        };
        let theta_at = |s: f64| pose.theta + herm_int(s0.omega, f0[1], s1.omega, f1[1], s);
        let (mut dx, mut dy) = (0.0, 0.0);
        for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let u = herm(s0.u, f0[0], s1.u, f1[0], *node);
            let th = theta_at(*node);
            dx += weight * u * th.cos();
            dy += weight * u * th.sin();
        }
        pose = Pose::new(pose.x + h * dx, pose.y + h * dy, theta_at(1.0));
        configurations.push(FullState::new(pose, s1.alpha.clone()));
    }

    let (constraint_residuals, max_constraint_residual) =
        residual_summary(params, &configurations, &reduced.states);
    Ok(Reconstruction {
        reduced: reduced.clone(),
        configurations,
        constraint_residuals,
        max_constraint_residual,
    })
}

/// Integrates the reduced equations jointly with the leading car's pose.
pub fn simulate_planar(
    params: &VehicleParams,
    initial: &ReducedState,
    initial_pose: Pose,
    t_end: f64,
    config: &IntegratorConfig,
    sampling: Sampling,
) -> Result<Reconstruction> {
    params.validate()?;
    initial.check(params)?;
    let mut y0 = initial.to_vec();
    y0.extend_from_slice(&[initial_pose.x, initial_pose.y, initial_pose.theta]);
    let sol = run(&PlanarSystem { params }, &y0, t_end, false, config)?;
    let (energy_drift, omega_drift) = drifts(params, &sol);
    let times = sampling.times(&sol);
    let rows: Vec<Vec<f64>> = match sampling {
        Sampling::Steps => sol.y.clone(),
        Sampling::Uniform { .. } => times.iter().map(|&t| sol.interpolate(t)).collect(),
    };
    let m = params.trailers + 2;
    let states: Vec<ReducedState> = rows.iter().map(|y| ReducedState::from_slice(&y[..m])).collect();
    let configurations: Vec<FullState> = rows
        .iter()
        .map(|y| FullState::new(Pose::new(y[m], y[m + 1], y[m + 2]), y[2..m].to_vec()))
        .collect();
    let (constraint_residuals, max_constraint_residual) =
        residual_summary(params, &configurations, &states);
    Ok(Reconstruction {
        reduced: Trajectory {
            times,
            states,
            energy_drift,
            omega_drift,
        },
        configurations,
        constraint_residuals,
        max_constraint_residual,
    })
}

fn csv_header(n: usize, planar: bool) -> String {
    let mut cols = vec!["t".to_string(), "u".to_string(), "omega".to_string()];
    cols.extend((1..=n).map(|k| format!("alpha{k}")));
    if planar {
        cols.extend(["x", "y", "theta"].iter().map(|s| s.to_string()));
    }
    cols.join(",")
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `t,u,omega,alpha1..alphan` rows with 17 significant digits.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    n: usize,
    trajectory: &Trajectory<ReducedState>,
) -> Result<()> {
    writeln!(out, "{}", csv_header(n, false))?;
    for (t, s) in trajectory.times.iter().zip(&trajectory.states) {
        let row: Vec<String> = std::iter::once(*t).chain(s.to_vec()).map(fmt_f64).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes `t,u,omega,alpha1..alphan,x,y,theta` rows with 17 significant digits.
pub fn write_reconstruction_csv<W: Write>(
    out: &mut W,
    n: usize,
    rec: &Reconstruction,
) -> Result<()> {
    writeln!(out, "{}", csv_header(n, true))?;
    for ((t, s), q) in rec
        .reduced
        .times
        .iter()
        .zip(&rec.reduced.states)
        .zip(&rec.configurations)
    {
        let row: Vec<String> = std::iter::once(*t)
            .chain(s.to_vec())
            .chain([q.x, q.y, q.theta])
            .map(fmt_f64)
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
