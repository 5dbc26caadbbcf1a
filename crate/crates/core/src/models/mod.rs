//! Trainable scorers: OC-SVM, PU-SVM (stochastic primal and dual QP), nnPU
//! networks, Elkan-Noto calibration, least-squares density ratio, and an
//! untrained random network.

mod config;
mod density_ratio;
mod dual;
mod en;
mod mlp;
mod nnpu;
mod scorer;
mod sgd;
mod standardize;
mod svm;

pub use config::{Activation, MlpSpec, TrainConfig};
pub use density_ratio::{
    train_density_ratio, train_density_ratio_with, DensityRatioFit, DensityRatioOptions, RATIO_FLOOR,
};
pub use dual::{
    dual_score, solve_pu_svm_dual, solve_pu_svm_dual_with, ConstraintResiduals, DualOptions, DualSolution,
};
pub use en::{train_en, EnFit, MIN_HOLDOUT};
pub use mlp::{random_scorer, Mlp, MlpGrad};
pub use nnpu::{nn_risk_and_grad, train_nnpu_mlp, train_nnpu_mlp_with, NnpuOptions};
pub use scorer::{Model, Scorer, ScorerKind};
pub use standardize::Standardizer;
pub use svm::{
    train_oc_svm, train_oc_svm_with, train_pu_svm_sgd, train_pu_svm_sgd_with, OcSvmOptions, PuSvmOptions, SvmParam,
};
