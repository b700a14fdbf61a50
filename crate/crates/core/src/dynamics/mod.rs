//! Reduced equations of motion and their restriction to energy tori.
//! Trajectories are simulated here and lifted back to the plane.

mod fields;
mod simulate;

pub use fields::{
    embed_angles, reduced_rhs, reduced_vector_field, torus_rhs, torus_vector_field,
    PlanarSystem, ReducedSystem, TorusSystem,
};
pub(crate) use simulate::fmt_f64;
pub use simulate::{
    reconstruct, simulate, simulate_dense, simulate_planar, simulate_torus, wheel_residuals,
    write_reconstruction_csv, write_trajectory_csv, Reconstruction, Sampling, Trajectory,
};
