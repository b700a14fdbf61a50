//! One trailer with `a = 0`: `omega` is conserved and the hitch angle flows
//! on a circle. Below the critical energy it winds around periodically;
//! above it, it settles onto a circular relative equilibrium.

use ntrailer::model::VehicleParams;
use ntrailer::single_trailer::{critical_energy, invariant_circle_flow, limit_circle_radius, period};

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_offset(0.0);
    let omega0 = 1.0;
    let ec = critical_energy(&p, omega0)?;
    println!("critical energy E_c = {ec}");

    for e in [0.6 * ec, ec, 1.5 * ec] {
        let flow = invariant_circle_flow(&p, omega0, e, 8)?;
        print!("E = {e:.4}: {} ({:?})", flow.regime, flow.orbit);
        for z in &flow.zeros {
            print!("  zero at alpha = {:.6} ({:?}, slope {:+.4})", z.alpha, z.kind, z.slope);
        }
        match flow.zeros.is_empty() {
            true => println!("  period {:.6}", period(&p, omega0, e)?),
            false => println!("  limit circle radius {:.6}", limit_circle_radius(&p, omega0, e)?),
        }
    }
    Ok(())
}
