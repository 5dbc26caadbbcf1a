use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{PuError, Result};

/// A finite feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DataPoint(Vec<f64>);

impl DataPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(PuError::Empty("data point coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(PuError::NonFinite("data point"));
        }
        Ok(DataPoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Skips validation; callers guarantee finiteness.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        DataPoint(coords)
    }
}

impl Deref for DataPoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DataPoint {
    type Error = PuError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        DataPoint::new(v)
    }
}

impl From<DataPoint> for Vec<f64> {
    fn from(p: DataPoint) -> Vec<f64> {
        p.0
    }
}

/// Checks that every point has dimension `dim`.
pub fn check_dims(points: &[DataPoint], dim: usize) -> Result<()> {
    match points.iter().find(|p| p.dim() != dim) {
        Some(p) => Err(PuError::DimensionMismatch {
            expected: dim,
            got: p.dim(),
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(DataPoint::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(DataPoint::new(vec![f64::NAN]).is_err());
        assert!(DataPoint::new(vec![]).is_err());
        assert_eq!(DataPoint::new(vec![1.0, 2.0]).unwrap().dim(), 2);
    }
}
