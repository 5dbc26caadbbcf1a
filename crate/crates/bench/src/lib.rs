//! Experiment runner for the `puoc` library: scenario configs, repeated
//! seeded runs, result files and paired model comparison.

pub mod builtin;
pub mod compare;
pub mod config;
pub mod error;
pub mod model;
pub mod runner;

pub use compare::{compare_models, Comparison};
pub use config::{DetectionConfig, ExperimentConfig, ScenarioSource, Sweep};
pub use error::{BenchError, Result};
pub use model::{ModelEntry, ModelKind, PriorSource, TrainedModel};
pub use runner::{read_records, run_experiment, write_csv, write_records, ResultRecord};
