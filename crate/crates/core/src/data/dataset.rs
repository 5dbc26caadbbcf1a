use serde::{Deserialize, Serialize};

use super::point::{check_dims, DataPoint};
use crate::error::{invalid, PuError, Result};

/// The trainer-facing view of a PU dataset: labeled positives and unlabeled
/// points, nothing else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuData {
    pub positive: Vec<DataPoint>,
    pub unlabeled: Vec<DataPoint>,
    pub dim: usize,
}

impl PuData {
    pub fn new(positive: Vec<DataPoint>, unlabeled: Vec<DataPoint>) -> Result<Self> {
        let dim = positive
            .first()
            .or_else(|| unlabeled.first())
            .map(|p| p.dim())
            .ok_or(PuError::Empty("dataset"))?;
        check_dims(&positive, dim)?;
        check_dims(&unlabeled, dim)?;
        Ok(PuData {
            positive,
            unlabeled,
            dim,
        })
    }

    pub(crate) fn require_both(&self) -> Result<()> {
        if self.positive.is_empty() {
            return Err(PuError::Empty("labeled positive sample"));
        }
        if self.unlabeled.is_empty() {
            return Err(PuError::Empty("unlabeled sample"));
        }
        Ok(())
    }
}

/// A case-control PU dataset with optional evaluation-only ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuDataset {
    data: PuData,
    /// Latent class (1 positive, 0 negative) of each unlabeled point.
    pub latent_labels: Option<Vec<u8>>,
    pub alpha_true: Option<f64>,
}

impl PuDataset {
    pub fn new(data: PuData, latent_labels: Option<Vec<u8>>, alpha_true: Option<f64>) -> Result<Self> {
        if let Some(labels) = &latent_labels {
            if labels.len() != data.unlabeled.len() {
                return Err(invalid(
                    "latent_labels",
                    format!("length {} differs from unlabeled size {}", labels.len(), data.unlabeled.len()),
                ));
            }
            if labels.iter().any(|&l| l > 1) {
                return Err(invalid("latent_labels", "labels must be 0 or 1"));
            }
        }
        if let Some(a) = alpha_true {
            if !(a > 0.0 && a <= 1.0) {
                return Err(invalid("alpha_true", format!("must lie in (0, 1], got {a}")));
            }
        }
        Ok(PuDataset {
            data,
            latent_labels,
            alpha_true,
        })
    }

    /// What trainers get to see.
    pub fn view(&self) -> &PuData {
        &self.data
    }

    pub fn positive(&self) -> &[DataPoint] {
        &self.data.positive
    }

    pub fn unlabeled(&self) -> &[DataPoint] {
        &self.data.unlabeled
    }

    pub fn dim(&self) -> usize {
        self.data.dim
    }

    /// Fraction of latent positives among the unlabeled points, when known.
    pub fn latent_positive_fraction(&self) -> Option<f64> {
        let labels = self.latent_labels.as_ref()?;
        if labels.is_empty() {
            return None;
        }
        Some(labels.iter().filter(|&&l| l == 1).count() as f64 / labels.len() as f64)
    }
}
