use thiserror::Error;

use crate::numerics::ode::IntegrationError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected} relative angles, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires {0}")]
    Precondition(String),

    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),

    #[error("state has zero kinetic energy; torus angle is undefined")]
    ZeroEnergy,

    #[error("state is not an equilibrium (vector field residual {residual:e})")]
    NotEquilibrium { residual: f64 },

    #[error("zero eigenvalue: equilibrium is not hyperbolic")]
    NonHyperbolic,

    #[error("energy {energy} is outside the {expected} regime (critical energy E_c = {critical})")]
    Regime {
        energy: f64,
        critical: f64,
        expected: &'static str,
    },

    #[error("period integrand denominator vanishes near alpha = {alpha} (energy at or above E_c = {critical})")]
    DenominatorVanishes { alpha: f64, critical: f64 },

    #[error("quadrature did not reach tolerance: estimated error {estimate:e} after {intervals} intervals")]
    Quadrature { estimate: f64, intervals: usize },

    #[error("bracket enumeration cap exceeded: rank {rank} of {dim} at length {length}")]
    BracketCapExceeded {
        rank: usize,
        dim: usize,
        length: usize,
    },

    #[error(transparent)]
    Integration(#[from] IntegrationError),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got })
        }
    }
}
