//! Experiment drivers behind the `ntrailer` binary. Each command reads a
//! [`RunConfig`] and returns its data file plus a JSON summary.

mod commands;
mod config;
mod verify;

pub use commands::{
    cmd_brackets, cmd_equilibria, cmd_holonomy, cmd_period, cmd_portrait, cmd_simulate,
    cmd_verify, exit_code, CommandOutput,
};
pub use config::{
    BracketsConfig, EquilibriaConfig, HolonomyConfig, PeriodConfig, PortraitConfig, RunConfig,
    SimulateConfig, VerifyConfig,
};
pub use verify::{run_verify, Check, VerifyReport};
