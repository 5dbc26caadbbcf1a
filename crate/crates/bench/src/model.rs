use serde::{Deserialize, Serialize};

use puoc::data::PuData;
use puoc::math::{ClassPrior, Kernel};
use puoc::models::{
    solve_pu_svm_dual_with, train_density_ratio_with, train_en, train_nnpu_mlp_with, train_oc_svm_with,
    train_pu_svm_sgd_with, Activation, DensityRatioOptions, DualOptions, MlpSpec, NnpuOptions, OcSvmOptions,
    PuSvmOptions, Scorer, SvmParam, TrainConfig,
};

use crate::error::{config_err, Result};

/// Class prior handed to the PU trainers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSource {
    /// The scenario's generating prior.
    #[default]
    True,
    Fixed(f64),
    /// Density-ratio estimate from the training data.
    Estimated,
}

fn half() -> f64 {
    0.5
}

fn oc_kernel() -> Kernel {
    Kernel::Rbf { gamma: 0.1 }
}

fn linear() -> Kernel {
    Kernel::Linear
}

fn kernel_weight() -> SvmParam {
    SvmParam::KernelWeight
}

fn hidden() -> Vec<usize> {
    vec![16]
}

fn tanh() -> Activation {
    Activation::Tanh
}

fn mlp_train() -> TrainConfig {
    TrainConfig::mlp_default()
}

fn holdout() -> f64 {
    0.2
}

fn basis() -> usize {
    100
}

fn dual_lambda() -> f64 {
    0.01
}

fn dual_tolerance() -> f64 {
    1e-8
}

fn yes() -> bool {
    true
}

/// A trainer and its hyperparameters. Omitted fields take the reference defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    OcSvm {
        #[serde(default = "half")]
        nu: f64,
        #[serde(default = "oc_kernel")]
        kernel: Kernel,
        #[serde(default)]
        standardize: bool,
        #[serde(default)]
        train: TrainConfig,
    },
    PuSvm {
        #[serde(default = "linear")]
        kernel: Kernel,
        #[serde(default = "kernel_weight")]
        param: SvmParam,
        #[serde(default)]
        unclamped: bool,
        #[serde(default)]
        standardize: bool,
        #[serde(default)]
        train: TrainConfig,
        #[serde(default)]
        prior: PriorSource,
    },
    PuSvmDual {
        #[serde(default = "linear")]
        kernel: Kernel,
        #[serde(default = "dual_lambda")]
        lambda: f64,
        #[serde(default = "dual_tolerance")]
        tolerance: f64,
        #[serde(default)]
        prior: PriorSource,
    },
    Nnpu {
        #[serde(default = "hidden")]
        hidden: Vec<usize>,
        #[serde(default = "tanh")]
        activation: Activation,
        #[serde(default)]
        defensive: bool,
        #[serde(default = "yes")]
        standardize: bool,
        #[serde(default = "mlp_train")]
        train: TrainConfig,
        #[serde(default)]
        prior: PriorSource,
    },
    ElkanNoto {
        #[serde(default = "hidden")]
        hidden: Vec<usize>,
        #[serde(default = "tanh")]
        activation: Activation,
        #[serde(default = "holdout")]
        holdout: f64,
        #[serde(default = "mlp_train")]
        train: TrainConfig,
    },
    DensityRatio {
        #[serde(default = "basis")]
        basis: usize,
        #[serde(default = "holdout")]
        holdout: f64,
        #[serde(default)]
        options: DensityRatioOptions,
    },
}

/// A model in an experiment, identified by `id` in results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub id: String,
    #[serde(flatten)]
    pub kind: ModelKind,
}

impl ModelEntry {
    pub fn new(id: impl Into<String>, kind: ModelKind) -> Self {
        ModelEntry { id: id.into(), kind }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub scorer: Scorer,
    /// Prior estimate, when the model produced one.
    pub alpha_hat: Option<f64>,
}

impl ModelKind {
    /// Default hyperparameters for a kind name such as `pu-svm`.
    pub fn from_name(name: &str) -> Result<Self> {
        serde_json::from_value(serde_json::json!({ "kind": name }))
            .map_err(|_| config_err(format!("unknown model kind `{name}`")))
    }

    /// Name as used in configs.
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::OcSvm { .. } => "oc-svm",
            ModelKind::PuSvm { .. } => "pu-svm",
            ModelKind::PuSvmDual { .. } => "pu-svm-dual",
            ModelKind::Nnpu { .. } => "nnpu",
            ModelKind::ElkanNoto { .. } => "elkan-noto",
            ModelKind::DensityRatio { .. } => "density-ratio",
        }
    }

    /// Trains on `data`. `alpha_true` is the generating prior when known;
    /// `seed` overrides every seed in the hyperparameters.
    pub fn train(&self, data: &PuData, alpha_true: Option<f64>, seed: u64) -> Result<TrainedModel> {
        let plain = |scorer| TrainedModel { scorer, alpha_hat: None };
        Ok(match self {
            ModelKind::OcSvm {
                nu,
                kernel,
                standardize,
                train,
            } => {
                let opts = OcSvmOptions {
                    kernel: *kernel,
                    standardize: *standardize,
                };
                plain(train_oc_svm_with(&data.positive, *nu, &train.with_seed(seed), &opts)?)
            }
            ModelKind::PuSvm {
                kernel,
                param,
                unclamped,
                standardize,
                train,
                prior,
            } => {
                let (alpha, alpha_hat) = resolve_prior(*prior, data, alpha_true, seed)?;
                let opts = PuSvmOptions {
                    kernel: *kernel,
                    param: *param,
                    unclamped: *unclamped,
                    standardize: *standardize,
                };
                TrainedModel {
                    scorer: train_pu_svm_sgd_with(data, alpha, &train.with_seed(seed), &opts)?,
                    alpha_hat,
                }
            }
            ModelKind::PuSvmDual {
                kernel,
                lambda,
                tolerance,
                prior,
            } => {
                let (alpha, alpha_hat) = resolve_prior(*prior, data, alpha_true, seed)?;
                let opts = DualOptions {
                    lambda: *lambda,
                    ..DualOptions::default()
                };
                let sol = solve_pu_svm_dual_with(data, alpha, *kernel, *tolerance, &opts)?;
                TrainedModel {
                    scorer: sol.to_scorer(data, *kernel)?,
                    alpha_hat,
                }
            }
            ModelKind::Nnpu {
                hidden,
                activation,
                defensive,
                standardize,
                train,
                prior,
            } => {
                let (alpha, alpha_hat) = resolve_prior(*prior, data, alpha_true, seed)?;
                let spec = MlpSpec::with_hidden(data.dim, hidden, *activation);
                let opts = NnpuOptions {
                    defensive: *defensive,
                    standardize: *standardize,
                };
                TrainedModel {
                    scorer: train_nnpu_mlp_with(data, alpha, &spec, &train.with_seed(seed), &opts)?,
                    alpha_hat,
                }
            }
            ModelKind::ElkanNoto {
                hidden,
                activation,
                holdout,
                train,
            } => {
                let spec = MlpSpec::with_hidden(data.dim, hidden, *activation);
                plain(train_en(data, &spec, &train.with_seed(seed), *holdout)?.scorer)
            }
            ModelKind::DensityRatio { basis, holdout, options } => {
                let cfg = TrainConfig::default().with_seed(seed);
                let fit = train_density_ratio_with(data, *basis, &cfg, *holdout, options)?;
                TrainedModel {
                    scorer: fit.scorer,
                    alpha_hat: Some(fit.alpha_hat),
                }
            }
        })
    }
}

fn resolve_prior(
    source: PriorSource,
    data: &PuData,
    alpha_true: Option<f64>,
    seed: u64,
) -> Result<(ClassPrior, Option<f64>)> {
    match source {
        PriorSource::True => {
            let a = alpha_true.ok_or_else(|| config_err("the true class prior is unknown; use a fixed or estimated prior"))?;
            Ok((ClassPrior::new(a)?, None))
        }
        PriorSource::Fixed(a) => Ok((ClassPrior::new(a)?, None)),
        PriorSource::Estimated => {
            let cfg = TrainConfig::default().with_seed(seed);
            let fit = train_density_ratio_with(data, basis(), &cfg, holdout(), &DensityRatioOptions::default())?;
            let a = fit.alpha_hat.clamp(1e-3, 1.0);
            Ok((ClassPrior::new(a)?, Some(fit.alpha_hat)))
        }
    }
}
