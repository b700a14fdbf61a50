//! Vehicle parameters, state types and the closed-form coefficient functions
//! of the reduced equations.

mod coeffs;
mod identities;
mod params;
mod se2;
mod state;
mod torus;

pub use coeffs::{coeff_a, coeff_q, coeff_r, grad_r};
pub(crate) use coeffs::{a_terms, grad_r_terms, q_value, r_value, Angles};
pub use identities::{identity_check, IdentityResiduals};
pub use params::VehicleParams;
pub use se2::{apply_se2, Se2};
pub use state::{lift_velocity, reduced_velocity, wrap, FullState, Pose, ReducedState};
pub use torus::{energy, torus_embed, torus_project, TorusCoords};
pub(crate) use torus::energy_unchecked;
