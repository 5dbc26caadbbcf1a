use serde::{Deserialize, Serialize};

use super::mlp::Mlp;
use super::standardize::Standardizer;
use crate::data::DataPoint;
use crate::error::{PuError, Result};
use crate::math::{loss::sigmoid, Kernel};

/// Which trainer produced a scorer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    OcSvm,
    PuSvm,
    PuSvmDual,
    Nnpu,
    ElkanNoto,
    DensityRatio,
    Random,
}

/// Parameters of a trained decision function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `K(w, x) - offset`, with `w` in input space.
    KernelWeight { kernel: Kernel, weight: Vec<f64>, offset: f64 },
    /// `sum_j coef_j K(c_j, x) - offset`.
    Expansion {
        kernel: Kernel,
        centers: Vec<Vec<f64>>,
        coef: Vec<f64>,
        offset: f64,
    },
    /// `scale * sum_j coef_j K(c_j, x)`; a nonnegative density-ratio fit.
    Ratio {
        kernel: Kernel,
        centers: Vec<Vec<f64>>,
        coef: Vec<f64>,
        scale: f64,
    },
    /// Network output; with a divisor, `sigmoid(net(x)) / divisor`.
    Network { net: Mlp, divisor: Option<f64> },
}

/// A trained model mapping a point to a real score; larger means more likely positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scorer {
    pub kind: ScorerKind,
    pub model: Model,
    pub standardizer: Option<Standardizer>,
    pub dim: usize,
    /// Whether the score is a (possibly unclipped) posterior estimate.
    #[serde(default)]
    pub emits_posterior: bool,
}

impl Scorer {
    pub fn new(kind: ScorerKind, model: Model, standardizer: Option<Standardizer>, dim: usize) -> Self {
        Scorer {
            kind,
            model,
            standardizer,
            dim,
            emits_posterior: false,
        }
    }

    fn raw(&self, x: &[f64]) -> f64 {
        match &self.model {
            Model::KernelWeight { kernel, weight, offset } => kernel.apply(weight, x) - offset,
            Model::Expansion {
                kernel,
                centers,
                coef,
                offset,
            } => {
                centers
                    .iter()
                    .zip(coef)
                    .map(|(c, a)| if *a == 0.0 { 0.0 } else { a * kernel.apply(c, x) })
                    .sum::<f64>()
                    - offset
            }
            Model::Ratio {
                kernel,
                centers,
                coef,
                scale,
            } => {
                scale
                    * centers
                        .iter()
                        .zip(coef)
                        .map(|(c, a)| if *a == 0.0 { 0.0 } else { a * kernel.apply(c, x) })
                        .sum::<f64>()
            }
            Model::Network { net, divisor } => {
                let out = net.forward(x);
                match divisor {
                    Some(d) => sigmoid(out) / d,
                    None => out,
                }
            }
        }
    }

    /// Score of `x`. Panics in debug builds if the dimension is wrong.
    pub fn score(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.standardizer {
            Some(s) => self.raw(&s.apply(x)),
            None => self.raw(x),
        }
    }

    pub fn try_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(PuError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.score(x))
    }

    pub fn score_all(&self, xs: &[DataPoint]) -> Vec<f64> {
        xs.iter().map(|x| self.score(x)).collect()
    }

    pub fn try_score_all(&self, xs: &[DataPoint]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.try_score(x)).collect()
    }

    /// Posterior estimate `p(y = 1 | x)` for scorers that produce one
    /// (Elkan-Noto, density ratio); the score clipped to `[0, 1]`.
    pub fn posterior(&self, x: &[f64]) -> Option<f64> {
        if !self.emits_posterior {
            return None;
        }
        Some(self.score(x).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_weight_and_expansion() {
        let s = Scorer::new(
            ScorerKind::PuSvm,
            Model::KernelWeight {
                kernel: Kernel::Linear,
                weight: vec![1.0, -2.0],
                offset: 0.5,
            },
            None,
            2,
        );
        assert_eq!(s.score(&[3.0, 1.0]), 0.5);
        assert!(s.try_score(&[1.0]).is_err());
        assert_eq!(s.posterior(&[3.0, 1.0]), None);

        let e = Scorer::new(
            ScorerKind::PuSvmDual,
            Model::Expansion {
                kernel: Kernel::Linear,
                centers: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                coef: vec![2.0, 3.0],
                offset: 1.0,
            },
            None,
            2,
        );
        assert_eq!(e.score(&[1.0, 1.0]), 4.0);
    }

    #[test]
    fn serde_round_trip() {
        let s = Scorer::new(
            ScorerKind::OcSvm,
            Model::KernelWeight {
                kernel: Kernel::Rbf { gamma: 0.25 },
                weight: vec![0.1, 0.2],
                offset: 0.3,
            },
            Some(Standardizer {
                mean: vec![1.0, 2.0],
                scale: vec![0.5, 4.0],
            }),
            2,
        );
        let json = serde_json::to_string(&s).unwrap();
        let back: Scorer = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.score(&[0.3, -0.7]).to_bits(), s.score(&[0.3, -0.7]).to_bits());
    }
}
