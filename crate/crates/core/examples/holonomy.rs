//! Net motion of the car over one period of the hitch angle. When `omega0 T / 2 pi` is
//! rational the planar path closes, unless it is an integer and the car drifts.
//! Otherwise the path fills an annulus.

use ntrailer::model::VehicleParams;
use ntrailer::single_trailer::{critical_energy, holonomy};

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_offset(0.0);
    let omega0 = 1.0;
    let floor = 0.5 * p.car_inertia * omega0 * omega0;
    let ec = critical_energy(&p, omega0)?;
    for frac in [0.1, 0.5, 0.9] {
        let e = floor + frac * (ec - floor);
        let h = holonomy(&p, omega0, e)?;
        println!(
            "E = {e:.4}  T = {:.6}  dtheta/2pi = {:.6}  shift = ({:+.6}, {:+.6})  {:?} {:?}",
            h.period,
            h.dtheta / std::f64::consts::TAU,
            h.dx,
            h.dy,
            h.classification,
            h.ratio
        );
    }
    Ok(())
}
