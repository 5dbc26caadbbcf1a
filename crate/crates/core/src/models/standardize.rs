use serde::{Deserialize, Serialize};

use crate::data::DataPoint;

/// Per-feature affine map to zero mean and unit variance, fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit<'a>(points: impl IntoIterator<Item = &'a DataPoint>, dim: usize) -> Self {
        let mut n = 0usize;
        let mut mean = vec![0.0; dim];
        let mut m2 = vec![0.0; dim];
        // Welford
        for p in points {
            n += 1;
            for ((m, s), &x) in mean.iter_mut().zip(m2.iter_mut()).zip(p.iter()) {
                let d = x - *m;
                *m += d / n as f64;
                *s += d * (x - *m);
            }
        }
        let scale = m2
            .iter()
            .map(|&s| {
                let sd = if n > 1 { (s / (n - 1) as f64).sqrt() } else { 0.0 };
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn apply_all(&self, xs: &[DataPoint]) -> Vec<Vec<f64>> {
        xs.iter().map(|x| self.apply(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centers_and_scales() {
        let pts: Vec<DataPoint> = [[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]]
            .iter()
            .map(|p| DataPoint::new(p.to_vec()).unwrap())
            .collect();
        let s = Standardizer::fit(&pts, 2);
        assert_eq!(s.mean, vec![3.0, 5.0]);
        assert_eq!(s.scale, vec![2.0, 1.0]);
        assert_eq!(s.apply(&[5.0, 6.0]), vec![1.0, 1.0]);
    }
}
