//! Losses, kernels and the empirical risk estimators.

mod kernel;
pub(crate) mod loss;
mod risk;

pub use kernel::{kernel_eval, Kernel};
pub use loss::{loss_eval, loss_grad, ClassCode, LossKind};
pub use risk::{pairwise_sum, risk_nn, risk_pn, risk_pu_unbiased, ClassPrior, RiskBreakdown};
