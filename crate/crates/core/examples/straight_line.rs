//! A car with one trailer and `a > 0`, started from a generic state,
//! straightens out: `omega` and the hitch angle decay to zero.

use ntrailer::dynamics::{simulate, Sampling};
use ntrailer::model::{ReducedState, VehicleParams};
use ntrailer::numerics::ode::IntegratorConfig;

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default();
    let start = ReducedState::new(0.8, 1.2, vec![1.0]);
    let traj = simulate(&p, &start, 200.0, &IntegratorConfig::rk45(1e-10), Sampling::Uniform { dt: 25.0 })?;
    println!("{:>6} {:>10} {:>12} {:>12}", "t", "u", "omega", "alpha1");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        println!("{t:6.1} {:10.6} {:12.3e} {:12.3e}", s.u, s.omega, s.wrapped().alpha[0]);
    }
    Ok(())
}
