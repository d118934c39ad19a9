//! Experiment harness for the expint integrators: configuration, commands and output.

pub mod commands;
pub mod config;
pub mod output;
pub mod problems;

pub use commands::Outcome;
pub use config::{ProblemKind, RunConfig, Settings};
