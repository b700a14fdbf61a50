//! The reduced equations rebuilt from the full Lagrangian and the wheel
//! constraints, compared with the closed-form vector field.

use ntrailer::cli::run_verify;
use ntrailer::dynamics::reduced_vector_field;
use ntrailer::model::{ReducedState, VehicleParams};
use ntrailer::oracle::{generated_system, structure_coefficients};
use ntrailer::model::{FullState, Pose};

fn main() -> ntrailer::Result<()> {
    let p = VehicleParams::default().with_trailers(3);
    let s = ReducedState::new(0.7, -0.4, vec![0.3, -1.2, 2.0]);
    let q = FullState::new(Pose::default(), s.alpha.clone());
    let generated = generated_system(&p, &q, s.u, s.omega)?;
    println!("closed form: {:?}", reduced_vector_field(&p, &s)?.to_vec());
    println!("generated:   {:?}", generated.rhs.to_vec());
    println!("C_12 = {:?}", structure_coefficients(&p, &q)?);

    let report = run_verify(&VehicleParams::default(), 200, 4, 7)?;
    for c in &report.checks {
        println!("{:<24} {:10.2e}  (tolerance {:.0e})", c.name, c.max_residual, c.tolerance);
    }
    Ok(())
}
