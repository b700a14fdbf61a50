//! Inertial dynamics of a car towing a chain of n trailers: reduced
//! equations on the energy torus, relative equilibria, the single-trailer
//! closed forms, a Lagrangian cross-check and the degree of nonholonomy.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod nonholonomy;
pub mod numerics;
pub mod oracle;
pub mod single_trailer;

pub use error::{Error, Result};
