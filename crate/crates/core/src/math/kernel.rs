use serde::{Deserialize, Serialize};

use crate::error::{invalid, PuError, Result};

/// Positive semi-definite kernel on feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn rbf(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid("gamma", format!("must be positive, got {gamma}")));
        }
        Ok(Kernel::Rbf { gamma })
    }

    /// Kernel value without the dimension check.
    #[inline]
    pub fn apply(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    /// Gradient of `K(w, x)` with respect to `w`, accumulated as `out += scale * dK/dw`.
    pub fn accumulate_grad_w(&self, w: &[f64], x: &[f64], scale: f64, out: &mut [f64]) {
        match *self {
            Kernel::Linear => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o += scale * xi;
                }
            }
            Kernel::Rbf { gamma } => {
                let k = self.apply(w, x);
                let c = scale * k * (-2.0 * gamma);
                for ((o, wi), xi) in out.iter_mut().zip(w).zip(x) {
                    *o += c * (wi - xi);
                }
            }
        }
    }
}

/// Evaluates `K(a, b)`, rejecting vectors of different length.
pub fn kernel_eval(k: Kernel, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(PuError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(k.apply(a, b))
}
