//! Experiment drivers, run configuration and the command-line interface.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::{GateConfig, RunConfig};
pub use experiments::*;
pub use output::{Format, Manifest, OutputDir};
