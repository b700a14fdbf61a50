//! With no trailers the vehicle is a Chaplygin sleigh. For `a > 0` the
//! rotation dies out and the sleigh settles into straight-line motion at
//! the speed fixed by its energy.

use ntrailer::dynamics::{simulate, Sampling};
use ntrailer::model::{energy, ReducedState, VehicleParams};
use ntrailer::numerics::ode::IntegratorConfig;

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_trailers(0);
    let start = ReducedState::new(0.2, 1.5, vec![]);
    let e = energy(&p, &start)?;
    let traj = simulate(&p, &start, 60.0, &IntegratorConfig::rk45(1e-10), Sampling::Uniform { dt: 10.0 })?;

    println!("{:>6} {:>12} {:>12}", "t", "u", "omega");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        println!("{t:6.1} {:12.8} {:12.3e}", s.u, s.omega);
    }
    println!("limit speed sqrt(2E/M) = {:.8}", (2.0 * e / p.car_mass).sqrt());
    println!("relative energy drift  = {:.2e}", traj.energy_drift);
    Ok(())
}
