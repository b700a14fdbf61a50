//! One trailer, `a = 0`, above the critical energy: the planar path of the
//! car spirals onto a circle of radius `l / sin(alpha1)`.

use ntrailer::dynamics::{simulate_planar, Sampling};
use ntrailer::model::{Pose, ReducedState, VehicleParams};
use ntrailer::numerics::ode::IntegratorConfig;
use ntrailer::single_trailer::{circle_speed, critical_energy, limit_circle_radius};

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_offset(0.0);
    let omega0 = 1.0;
    let e = 1.5 * critical_energy(&p, omega0)?;
    let alpha0 = 2.0;
    let u0 = circle_speed(&p, omega0, e, alpha0)?;
    let start = ReducedState::new(u0, omega0, vec![alpha0]);
    let rec = simulate_planar(&p, &start, Pose::default(), 80.0, &IntegratorConfig::rk45(1e-10), Sampling::Uniform { dt: 10.0 })?;
    for (t, (s, q)) in rec.reduced.times.iter().zip(rec.reduced.states.iter().zip(&rec.configurations)) {
        println!("t = {t:5.1}  alpha = {:.6}  u/omega = {:.6}  pose = ({:+.3}, {:+.3})", s.alpha[0], s.u / s.omega, q.x, q.y);
    }
    println!("predicted radius {:.6}", limit_circle_radius(&p, omega0, e)?);
    println!("max wheel-constraint residual {:.1e}", rec.max_constraint_residual);
    Ok(())
}
