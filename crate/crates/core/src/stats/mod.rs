//! ROC AUC and the two rank tests used for model comparison and reliability checks.

mod auc;
mod mann_whitney;
mod ranks;
mod wilcoxon;

use serde::{Deserialize, Serialize};

pub use auc::roc_auc;
pub use mann_whitney::{mann_whitney_u, mann_whitney_u_with, u_statistic, MWU_EXACT_CAP};
pub use ranks::midranks;
pub use wilcoxon::{wilcoxon_signed_rank, wilcoxon_signed_rank_with, WILCOXON_EXACT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestMethod {
    MannWhitneyU,
    WilcoxonSignedRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    #[default]
    TwoSided,
    /// The first sample tends to be smaller.
    Less,
    /// The first sample tends to be larger.
    Greater,
}

/// How a p-value is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValueMethod {
    /// Exact when the sample fits under the enumeration cap, normal approximation otherwise.
    #[default]
    Auto,
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
    pub alternative: Alternative,
    pub n1: usize,
    pub n2: usize,
    /// True when the null distribution was enumerated.
    pub exact: bool,
}

/// p-value from the lower and upper tail probabilities of the observed statistic.
fn tail_p(alternative: Alternative, p_le: f64, p_ge: f64) -> f64 {
    let p = match alternative {
        Alternative::Less => p_le,
        Alternative::Greater => p_ge,
        Alternative::TwoSided => 2.0 * p_le.min(p_ge),
    };
    p.clamp(0.0, 1.0)
}

/// Continuity-corrected normal approximation.
fn normal_p(alternative: Alternative, stat: f64, mean: f64, sd: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    if !(sd > 0.0) {
        return 1.0;
    }
    let n = Normal::standard();
    let p = match alternative {
        Alternative::Greater => n.sf((stat - mean - 0.5) / sd),
        Alternative::Less => n.cdf((stat - mean + 0.5) / sd),
        Alternative::TwoSided => {
            let z = ((stat - mean).abs() - 0.5).max(0.0) / sd;
            2.0 * n.sf(z)
        }
    };
    p.clamp(0.0, 1.0)
}
