//! Datasets, synthetic scenarios and CSV ingestion.

mod csv_io;
mod dataset;
mod point;
pub(crate) mod rng;
mod synth;

pub use csv_io::{load_csv_dataset, load_test_csv, write_test_csv, write_train_csv, CsvSchema};
pub use dataset::{PuData, PuDataset};
pub use point::{check_dims, DataPoint};
pub use rng::{derive_seed, seeded_rng, Rng};
pub use synth::{
    gen_multimodal_scenario, gen_two_gaussian_scenario, sample_mixture, scar_sample, GaussianMode, Scenario,
    ScenarioSpec,
};
