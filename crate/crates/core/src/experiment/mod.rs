//! Configuration, presets and the runner behind the `mlsc` binary.

mod config;
mod runner;

pub use config::{
    preset, ExperimentConfig, GridConfig, Method, OutputConfig, ProblemConfig, ReferenceConfig, PRESETS,
};
pub use runner::{write_csv, Experiment, PlanRows, RunRow, SweepFit, CSV_COLUMNS, CSV_SCHEMA_VERSION};
