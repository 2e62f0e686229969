//! Reproducible verification runs over the `loopax` modules.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::ExperimentConfig;
pub use experiments::{find, list, Experiment, Plan, RunContext, REGISTRY};
pub use report::{emit, CheckRow, Format, Report};
