//! Named scenarios and the experiment configs that reproduce them.

use std::path::PathBuf;

use puoc::data::{GaussianMode, ScenarioSpec};
use puoc::math::Kernel;
use puoc::models::{SvmParam, TrainConfig};

use crate::config::{ExperimentConfig, ScenarioSource, Sweep};
use crate::error::{config_err, Result};
use crate::model::{ModelEntry, ModelKind, PriorSource};

pub const NAMES: [&str; 5] = ["fig1", "fig1-shift", "fig3", "alpha-sweep", "size-sweep"];

/// Base scenario of a built-in name.
pub fn scenario(name: &str, seed: u64) -> Result<ScenarioSpec> {
    Ok(match name {
        "fig1" | "alpha-sweep" => ScenarioSpec::fig1(seed),
        "fig1-shift" => ScenarioSpec::fig1_shift(seed),
        "fig3" => ScenarioSpec::fig3(seed),
        // few latent negatives, so the unlabeled sample size matters
        "size-sweep" => ScenarioSpec {
            negative_modes: vec![GaussianMode::isotropic(vec![3.0, 0.0], 1.0, 1.0)],
            alpha: 0.9,
            ..ScenarioSpec::fig1(seed)
        },
        other => {
            return Err(config_err(format!(
                "unknown scenario `{other}`; expected one of {}",
                NAMES.join(", ")
            )))
        }
    })
}

pub fn oc_svm() -> ModelEntry {
    ModelEntry::new(
        "oc-svm",
        ModelKind::OcSvm {
            nu: 0.5,
            kernel: Kernel::Rbf { gamma: 0.1 },
            standardize: false,
            train: TrainConfig::default(),
        },
    )
}

pub fn pu_svm_linear() -> ModelEntry {
    ModelEntry::new(
        "pu-svm",
        ModelKind::PuSvm {
            kernel: Kernel::Linear,
            param: SvmParam::KernelWeight,
            unclamped: false,
            standardize: false,
            train: TrainConfig::default(),
            prior: PriorSource::True,
        },
    )
}

pub fn pu_svm_rbf() -> ModelEntry {
    ModelEntry::new(
        "pu-svm",
        ModelKind::PuSvm {
            kernel: Kernel::Rbf { gamma: 0.25 },
            param: SvmParam::Expansion { landmarks: 100 },
            unclamped: false,
            standardize: false,
            train: TrainConfig::default(),
            prior: PriorSource::True,
        },
    )
}

/// OC-SVM against PU-SVM on a built-in scenario, 10 repeats.
pub fn config(name: &str) -> Result<ExperimentConfig> {
    scenario(name, 0)?;
    let pu = if name == "fig3" { pu_svm_rbf() } else { pu_svm_linear() };
    let sweep = match name {
        "alpha-sweep" => Some(Sweep::Alpha(vec![0.5, 0.75, 0.95])),
        "size-sweep" => Some(Sweep::UnlabeledSize(vec![50, 250, 2000])),
        _ => None,
    };
    Ok(ExperimentConfig {
        scenario: ScenarioSource::Builtin(name.to_string()),
        models: vec![oc_svm(), pu],
        repeats: 10,
        base_seed: 0,
        sweep,
        detection: None,
        output_path: PathBuf::from(format!("{name}.jsonl")),
        csv_path: None,
        record_wall_time: false,
    })
}
