//! Residual report aggregating the independent checks of the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{reduced_vector_field, torus_rhs};
use crate::equilibria::{enumerate_equilibria, equilibria_a0, linearize_on_torus, vector_field_residual};
use crate::error::Result;
use crate::model::{coeff_q, coeff_r, energy, grad_r, identity_check, FullState, Pose, ReducedState, VehicleParams};
use crate::oracle::{
    bodies_mass_matrix, constrained_lagrangian_from_bodies, generated_rhs, mass_matrix,
    structure_coefficients, trailer_speed_check,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Sampler {
    rng: ChaCha8Rng,
    base: VehicleParams,
    max_trailers: usize,
    drawn: usize,
}

impl Sampler {
    fn params(&mut self) -> VehicleParams {
        let n = self.drawn % (self.max_trailers + 1);
        self.drawn += 1;
        self.base.with_trailers(n)
    }

    fn state(&mut self, n: usize) -> ReducedState {
        let rng = &mut self.rng;
        ReducedState::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            (0..n).map(|_| rng.gen_range(-3.2..3.2)).collect(),
        )
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

fn check(name: &'static str, samples: usize, max_residual: f64, tolerance: f64) -> Check {
    Check {
        name,
        samples,
        max_residual,
        tolerance,
        passed: max_residual < tolerance,
    }
}

/// Runs every check on `params` with the trailer count cycling through
/// `0..=max_trailers` and random states drawn from `seed`. Sequential, so
/// the report is reproducible bit for bit.
pub fn run_verify(
    params: &VehicleParams,
    samples: usize,
    max_trailers: usize,
    seed: u64,
) -> Result<VerifyReport> {
    params.validate()?;
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(seed),
        base: *params,
        max_trailers,
        drawn: 0,
    };
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = s.params();
        let st = s.state(p.trailers);
        let closed = reduced_vector_field(&p, &st)?.to_vec();
        let generated = generated_rhs(&p, &st)?.to_vec();
        worst = worst.max(max_abs_diff(&closed, &generated));
    }
    checks.push(check("oracle_equivalence", samples, worst, 1e-9));

    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = s.params();
        let st = s.state(p.trailers);
        let q = FullState::new(Pose::default(), st.alpha.clone());
        let (c1, c2) = structure_coefficients(&p, &q)?;
        let r = coeff_r(&p, &st.alpha)?;
        let qq = coeff_q(&p, &st.alpha)?;
        let e1 = qq / (p.link * p.link * r);
        let e2 = -p.car_mass * p.offset / p.car_axle_inertia();
        worst = worst.max((c1 - e1).abs()).max((c2 - e2).abs());
    }
    checks.push(check("projection_coefficients", samples, worst, 1e-10));

    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = s.params();
        let st = s.state(p.trailers);
        let res = trailer_speed_check(&p, &st)?;
        worst = res.iter().fold(worst, |m, r| m.max(r.abs()));
    }
    checks.push(check("trailer_speeds", samples, worst, 1e-12));

    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = s.params();
        let st = s.state(p.trailers);
        let from_bodies = constrained_lagrangian_from_bodies(&p, &st)?;
        let closed = energy(&p, &st)?;
        worst = worst.max((from_bodies - closed).abs() / closed.max(1.0));
    }
    checks.push(check("constrained_lagrangian", samples, worst, 1e-10));

    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = s.params();
        let st = s.state(p.trailers);
        let weights: Vec<f64> = (0..p.trailers).map(|_| s.rng.gen_range(0.2..5.0)).collect();
        worst = worst.max(identity_check(&weights, &st.alpha).max());
        if p.trailers > 0 {
            let d1 = grad_r(&p, &st.alpha)?[0];
            let q = coeff_q(&p, &st.alpha)?;
            worst = worst.max((d1 + 2.0 * q / (p.link * p.link)).abs());
        }
    }
    checks.push(check("identities", samples, worst, 1e-10));

    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = s.params();
        let st = s.state(p.trailers);
        let theta = s.rng.gen_range(-3.2..3.2);
        let q = FullState::new(Pose::new(0.0, 0.0, theta), st.alpha);
        let g = mass_matrix(&p, &q)?;
        let gb = bodies_mass_matrix(&p, &q)?;
        let scale = g.matrix().amax().max(1.0);
        worst = worst.max((g.matrix() - gb.matrix()).amax() / scale);
    }
    checks.push(check("mass_matrix", samples, worst, 1e-12));

    let (count, worst) = equilibrium_residuals(params, max_trailers)?;
    checks.push(check("equilibrium_residuals", count, worst, 1e-12));
    if params.offset > 0.0 {
        let (count, worst) = linearization_residuals(params, max_trailers)?;
        checks.push(check("equilibrium_jacobians", count, worst, 1e-6));
    }

    Ok(VerifyReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn equilibrium_residuals(params: &VehicleParams, max_trailers: usize) -> Result<(usize, f64)> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 0..=max_trailers {
        let p = params.with_trailers(n);
        let states: Vec<ReducedState> = if p.offset > 0.0 {
            enumerate_equilibria(&p, 1.0)?.into_iter().map(|e| e.state).collect()
        } else {
            let u0 = p.link * (n as f64 + 1.0).sqrt();
            equilibria_a0(&p, u0, 1.0)?.solutions.into_iter().map(|e| e.state).collect()
        };
        for st in states {
            worst = worst.max(vector_field_residual(&p, &st)?);
            count += 1;
        }
    }
    Ok((count, worst))
}

/// Closed-form torus Jacobians against central differences of the torus flow.
fn linearization_residuals(params: &VehicleParams, max_trailers: usize) -> Result<(usize, f64)> {
    let energy_level = 1.0;
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 0..=max_trailers {
        let p = params.with_trailers(n);
        for point in enumerate_equilibria(&p, energy_level)? {
            let jac = linearize_on_torus(&p, energy_level, &point)?;
            let mut y = point.signature.angles();
            y[1..].copy_from_slice(&point.state.alpha);
            let dim = y.len();
            let (mut up, mut dn) = (vec![0.0; dim], vec![0.0; dim]);
            for j in 0..dim {
                let (mut yu, mut yd) = (y.clone(), y.clone());
                yu[j] += h;
                yd[j] -= h;
                torus_rhs(&p, energy_level, &yu, &mut up);
                torus_rhs(&p, energy_level, &yd, &mut dn);
                for i in 0..dim {
                    let fd = (up[i] - dn[i]) / (2.0 * h);
                    worst = worst.max((fd - jac[(i, j)]).abs());
                }
            }
            count += 1;
        }
    }
    Ok((count, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters_pass() {
        let report = run_verify(&VehicleParams::default(), 50, 4, 3).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn zero_offset_uses_circular_equilibria() {
        let p = VehicleParams::default().with_offset(0.0);
        let report = run_verify(&p, 20, 3, 3).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.checks.iter().all(|c| c.name != "equilibrium_jacobians"));
    }
}
