//! Period of the hitch angle across the subcritical range. It starts at
//! `2 pi / omega0` when the car spins in place and grows without bound as
//! the energy approaches `E_c`.

use ntrailer::model::VehicleParams;
use ntrailer::single_trailer::{critical_energy, period_with_error};

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_offset(0.0);
    let omega0 = 1.0;
    let floor = 0.5 * p.car_inertia * omega0 * omega0;
    let ec = critical_energy(&p, omega0)?;
    println!("{:>10} {:>14} {:>10}", "E", "T", "error");
    for k in 0..10 {
        let e = floor + (ec - floor) * (1.0 - 0.5_f64.powi(k));
        let r = period_with_error(&p, omega0, e)?;
        println!("{e:10.6} {:14.8} {:10.1e}", r.value, r.error);
    }
    Ok(())
}
