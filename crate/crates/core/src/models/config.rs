use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Optimizer settings shared by the SGD trainers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// L2 penalty weight.
    pub lambda: f64,
    pub momentum: f64,
    pub seed: u64,
    /// Multiplicative learning-rate decay applied after every epoch.
    pub lr_decay: f64,
}

impl Default for TrainConfig {
    /// Reference PU-SVM settings: lambda 0.01, lr 5e-3, decay 0.995, 100 epochs.
    fn default() -> Self {
        TrainConfig {
            learning_rate: 5e-3,
            epochs: 100,
            batch_size: 64,
            lambda: 0.01,
            momentum: 0.0,
            seed: 0,
            lr_decay: 0.995,
        }
    }
}

impl TrainConfig {
    /// Settings used for the small networks (nnPU, EN).
    pub fn mlp_default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 40,
            batch_size: 64,
            lambda: 1e-4,
            momentum: 0.9,
            seed: 0,
            lr_decay: 0.98,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        TrainConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(invalid("learning_rate", "must be positive"));
        }
        if self.epochs == 0 {
            return Err(invalid("epochs", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size", "must be positive"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid("lambda", "must be nonnegative"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(invalid("momentum", "must lie in [0, 1)"));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(invalid("lr_decay", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Relu,
}

/// Layer widths from input to the single output unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
}

impl MlpSpec {
    pub fn new(layer_sizes: Vec<usize>, activation: Activation) -> Self {
        MlpSpec {
            layer_sizes,
            activation,
        }
    }

    /// `dim -> hidden... -> 1`.
    pub fn with_hidden(dim: usize, hidden: &[usize], activation: Activation) -> Self {
        let mut layer_sizes = Vec::with_capacity(hidden.len() + 2);
        layer_sizes.push(dim);
        layer_sizes.extend_from_slice(hidden);
        layer_sizes.push(1);
        MlpSpec {
            layer_sizes,
            activation,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.layer_sizes.len() < 2 {
            return Err(invalid("layer_sizes", "need at least an input and an output layer"));
        }
        if self.layer_sizes.iter().any(|&s| s == 0) {
            return Err(invalid("layer_sizes", "layer widths must be positive"));
        }
        if self.layer_sizes[0] != dim {
            return Err(invalid(
                "layer_sizes",
                format!("input width {} differs from data dimension {dim}", self.layer_sizes[0]),
            ));
        }
        if *self.layer_sizes.last().unwrap() != 1 {
            return Err(invalid("layer_sizes", "output width must be 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert!(TrainConfig { momentum: 1.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { lr_decay: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { epochs: 0, ..Default::default() }.validate().is_err());
        let spec = MlpSpec::with_hidden(3, &[8], Activation::Tanh);
        assert_eq!(spec.layer_sizes, vec![3, 8, 1]);
        assert!(spec.validate(3).is_ok());
        assert!(spec.validate(2).is_err());
        assert!(MlpSpec::new(vec![3, 2], Activation::Relu).validate(3).is_err());
    }
}
