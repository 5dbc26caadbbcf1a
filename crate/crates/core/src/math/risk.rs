use serde::{Deserialize, Serialize};

use super::loss::{loss_eval, ClassCode, LossKind};
use crate::error::{invalid, PuError, Result};

/// Fraction of positives in the unlabeled mixture, `0 < alpha <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ClassPrior(f64);

impl ClassPrior {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(ClassPrior(alpha))
        } else {
            Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ClassPrior {
    type Error = PuError;
    fn try_from(v: f64) -> Result<Self> {
        ClassPrior::new(v)
    }
}

impl From<ClassPrior> for f64 {
    fn from(p: ClassPrior) -> f64 {
        p.0
    }
}

/// Decomposed empirical PU risk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBreakdown {
    pub total: f64,
    /// `alpha * mean l(+1, s_p)`
    pub pos_term: f64,
    /// `mean l(-1, s_u) - alpha * mean l(-1, s_p)` before any clamping.
    pub neg_term_raw: f64,
    pub clamped: bool,
}

const PAIRWISE_BLOCK: usize = 1024;

/// Sum with pairwise (cascade) reduction above 1024 elements.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

fn mean_loss(kind: LossKind, y: ClassCode, scores: &[f64], what: &'static str) -> Result<f64> {
    if scores.is_empty() {
        return Err(PuError::Empty(what));
    }
    let losses: Vec<f64> = scores.iter().map(|&t| loss_eval(kind, y, t)).collect();
    Ok(pairwise_sum(&losses) / scores.len() as f64)
}

/// Supervised risk `alpha * R_p^+ + (1 - alpha) * R_n^-`.
pub fn risk_pn(loss: LossKind, scores_p: &[f64], scores_n: &[f64], alpha: ClassPrior) -> Result<f64> {
    let a = alpha.value();
    let rp = mean_loss(loss, ClassCode::Positive, scores_p, "positive scores")?;
    let rn = mean_loss(loss, ClassCode::Negative, scores_n, "negative scores")?;
    Ok(a * rp + (1.0 - a) * rn)
}

fn pu_terms(loss: LossKind, scores_p: &[f64], scores_u: &[f64], alpha: ClassPrior) -> Result<(f64, f64)> {
    let a = alpha.value();
    let rp_pos = mean_loss(loss, ClassCode::Positive, scores_p, "positive scores")?;
    let rp_neg = mean_loss(loss, ClassCode::Negative, scores_p, "positive scores")?;
    let ru_neg = mean_loss(loss, ClassCode::Negative, scores_u, "unlabeled scores")?;
    Ok((a * rp_pos, ru_neg - a * rp_neg))
}

/// Unbiased PU risk: the negative risk is replaced by `R_u^- - alpha R_p^-`.
pub fn risk_pu_unbiased(
    loss: LossKind,
    scores_p: &[f64],
    scores_u: &[f64],
    alpha: ClassPrior,
) -> Result<RiskBreakdown> {
    let (pos_term, neg_term_raw) = pu_terms(loss, scores_p, scores_u, alpha)?;
    Ok(RiskBreakdown {
        total: pos_term + neg_term_raw,
        pos_term,
        neg_term_raw,
        clamped: false,
    })
}

/// Non-negative PU risk: the corrected negative term is clamped at zero.
pub fn risk_nn(loss: LossKind, scores_p: &[f64], scores_u: &[f64], alpha: ClassPrior) -> Result<RiskBreakdown> {
    let (pos_term, neg_term_raw) = pu_terms(loss, scores_p, scores_u, alpha)?;
    Ok(RiskBreakdown {
        total: pos_term + neg_term_raw.max(0.0),
        pos_term,
        neg_term_raw,
        clamped: neg_term_raw < 0.0,
    })
}
