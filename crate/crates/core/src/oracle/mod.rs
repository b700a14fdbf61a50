//! An independent derivation of the reduced equations from the full
//! Lagrangian and wheel constraints, used to check the closed forms.

mod quasi_velocity;
mod dual;
mod mechanics;

pub use quasi_velocity::{
    constrained_lagrangian_from_bodies, generated_rhs, generated_rhs_at, generated_system,
    lie_bracket, orthogonal_project, structure_coefficients, trailer_speed_check,
    GeneratedSystem,
};
pub use mechanics::{
    bodies_mass_matrix, constraint_residuals, distribution_basis, lagrangian, mass_matrix,
    DistributionBasis, MassMatrix,
};
