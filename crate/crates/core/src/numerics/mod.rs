//! Self-contained ODE and quadrature routines.

pub mod ode;
pub mod quad;
