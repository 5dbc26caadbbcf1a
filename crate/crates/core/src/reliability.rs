//! Checks on whether unlabeled data can be trusted for PU training: a high
//! class prior (unlabeled looks like the positives) and a shift of the
//! negatives between training and test time.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{seeded_rng, DataPoint};
use crate::error::{invalid, PuError, Result};
use crate::models::Scorer;
use crate::stats::{mann_whitney_u, Alternative};

pub const DEFAULT_P_CRIT: f64 = 0.1;
pub const MIN_DETECTION_SAMPLE: usize = 20;
pub const MIN_CALIBRATION_SAMPLE: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectionMode {
    HighAlpha,
    NegativeShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recommendation {
    UsePu,
    UseOcOrRobustPuOc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityVerdict {
    pub p_value: f64,
    pub p_crit: f64,
    pub unreliable: bool,
    pub mode: DetectionMode,
    pub recommendation: Recommendation,
}

impl ReliabilityVerdict {
    /// High-alpha: unreliable when the two score samples are indistinguishable
    /// (`p > p_crit`). Shift: unreliable when they differ (`p < p_crit`).
    pub fn from_p_value(mode: DetectionMode, p_value: f64, p_crit: f64) -> Self {
        let unreliable = match mode {
            DetectionMode::HighAlpha => p_value > p_crit,
            DetectionMode::NegativeShift => p_value < p_crit,
        };
        ReliabilityVerdict {
            p_value,
            p_crit,
            unreliable,
            mode,
            recommendation: if unreliable {
                Recommendation::UseOcOrRobustPuOc
            } else {
                Recommendation::UsePu
            },
        }
    }
}

fn check_p_crit(p_crit: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_crit) {
        return Err(invalid("p_crit", format!("must lie in [0, 1], got {p_crit}")));
    }
    Ok(())
}

fn check_size(name: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(PuError::InsufficientData(format!("{name} has {n} points; need at least {min}")));
    }
    Ok(())
}

fn score_p_value(scorer: &Scorer, a: &[DataPoint], b: &[DataPoint]) -> Result<f64> {
    let sa = scorer.try_score_all(a)?;
    let sb = scorer.try_score_all(b)?;
    Ok(mann_whitney_u(&sa, &sb, Alternative::TwoSided)?.p_value)
}

/// Compares scores of labeled positives and unlabeled points. Scores that
/// cannot be told apart suggest the unlabeled data holds few negatives.
pub fn detect_high_alpha(
    scorer: &Scorer,
    pos_sample: &[DataPoint],
    unl_sample: &[DataPoint],
    p_crit: f64,
) -> Result<ReliabilityVerdict> {
    check_p_crit(p_crit)?;
    check_size("positive sample", pos_sample.len(), MIN_DETECTION_SAMPLE)?;
    check_size("unlabeled sample", unl_sample.len(), MIN_DETECTION_SAMPLE)?;
    let p = score_p_value(scorer, pos_sample, unl_sample)?;
    Ok(ReliabilityVerdict::from_p_value(DetectionMode::HighAlpha, p, p_crit))
}

/// p-value of the two-sided Mann-Whitney test between two seeded halves of
/// one sample, usable as a data-driven `p_crit`.
pub fn calibrate_p_crit(scorer: &Scorer, reference_sample: &[DataPoint], seed: u64) -> Result<f64> {
    check_size("reference sample", reference_sample.len(), MIN_CALIBRATION_SAMPLE)?;
    let mut scores = scorer.try_score_all(reference_sample)?;
    scores.shuffle(&mut seeded_rng(seed));
    let (a, b) = scores.split_at(scores.len() / 2);
    Ok(mann_whitney_u(a, b, Alternative::TwoSided)?.p_value)
}

/// Compares scores of training-time and test-time unlabeled data; a
/// difference suggests the negatives moved.
pub fn detect_negative_shift(
    scorer: &Scorer,
    unl_train: &[DataPoint],
    unl_test: &[DataPoint],
    p_crit: f64,
) -> Result<ReliabilityVerdict> {
    check_p_crit(p_crit)?;
    check_size("training unlabeled sample", unl_train.len(), MIN_DETECTION_SAMPLE)?;
    check_size("test unlabeled sample", unl_test.len(), MIN_DETECTION_SAMPLE)?;
    let p = score_p_value(scorer, unl_train, unl_test)?;
    Ok(ReliabilityVerdict::from_p_value(DetectionMode::NegativeShift, p, p_crit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        let v = ReliabilityVerdict::from_p_value(DetectionMode::HighAlpha, 0.5, 0.1);
        assert!(v.unreliable);
        assert_eq!(v.recommendation, Recommendation::UseOcOrRobustPuOc);
        let v = ReliabilityVerdict::from_p_value(DetectionMode::NegativeShift, 0.5, 0.1);
        assert!(!v.unreliable);
        assert_eq!(v.recommendation, Recommendation::UsePu);
        // equality is never a signal in either mode
        assert!(!ReliabilityVerdict::from_p_value(DetectionMode::HighAlpha, 0.1, 0.1).unreliable);
        assert!(!ReliabilityVerdict::from_p_value(DetectionMode::NegativeShift, 0.1, 0.1).unreliable);
    }
}
