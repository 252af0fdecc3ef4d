//! Experiment configuration and the scenario runner behind the `hypercast`
//! binary.

pub mod config;
pub mod runner;

pub use config::{parse_config, DestSampling, ExperimentConfig, GraphKind, ParsedConfig, Scenario};
pub use runner::{render, replay, run_experiment, Manifest, RunOptions, RunOutcome};
