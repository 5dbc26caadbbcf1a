use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::config::{Activation, MlpSpec};
use super::scorer::{Model, Scorer, ScorerKind};
use crate::data::seeded_rng;
use crate::data::rng::Rng;
use crate::error::Result;

/// Fully connected network with a single linear output unit.
///
/// Parameters live in one flat vector: for each layer the weight matrix
/// (row-major, `out x in`) followed by the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub activation: Activation,
    pub params: Vec<f64>,
}

/// Gradient with the same layout as [`Mlp::params`].
pub type MlpGrad = Vec<f64>;

struct Trace {
    /// Input to each layer.
    inputs: Vec<Vec<f64>>,
    /// Pre-activations of each hidden layer.
    pre: Vec<Vec<f64>>,
    output: f64,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn init(spec: &MlpSpec, rng: &mut Rng) -> Self {
        let sizes = spec.layer_sizes.clone();
        let n_params: usize = sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum();
        let mut params = Vec::with_capacity(n_params);
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| rng.random_range(-limit..=limit)));
            params.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Mlp {
            sizes,
            activation: spec.activation,
            params,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    fn layer_offsets(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        // (offset, n_in, n_out)
        self.sizes.windows(2).scan(0usize, |off, w| {
            let start = *off;
            *off += w[1] * (w[0] + 1);
            Some((start, w[0], w[1]))
        })
    }

    fn act(&self, z: f64) -> f64 {
        match self.activation {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    fn act_grad(&self, z: f64) -> f64 {
        match self.activation {
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn trace(&self, x: &[f64]) -> Trace {
        let n_layers = self.sizes.len() - 1;
        let mut inputs = Vec::with_capacity(n_layers);
        let mut pre = Vec::with_capacity(n_layers.saturating_sub(1));
        let mut a = x.to_vec();
        let mut output = 0.0;
        for (l, (off, n_in, n_out)) in self.layer_offsets().enumerate() {
            let w = &self.params[off..off + n_in * n_out];
            let b = &self.params[off + n_in * n_out..off + n_in * n_out + n_out];
            let z: Vec<f64> = (0..n_out)
                .map(|o| b[o] + w[o * n_in..(o + 1) * n_in].iter().zip(&a).map(|(wi, ai)| wi * ai).sum::<f64>())
                .collect();
            if l + 1 == n_layers {
                output = z[0];
                inputs.push(a);
                break;
            }
            let next: Vec<f64> = z.iter().map(|&v| self.act(v)).collect();
            inputs.push(std::mem::replace(&mut a, next));
            pre.push(z);
        }
        Trace { inputs, pre, output }
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        self.trace(x).output
    }

    /// Accumulates `dout * d output(x) / d params` into `grad`; returns the output.
    pub fn accumulate_grad(&self, x: &[f64], dout: f64, grad: &mut [f64]) -> f64 {
        let trace = self.trace(x);
        let offsets: Vec<_> = self.layer_offsets().collect();
        let mut delta = vec![dout];
        for (l, &(off, n_in, n_out)) in offsets.iter().enumerate().rev() {
            let a = &trace.inputs[l];
            for o in 0..n_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row = &mut grad[off + o * n_in..off + (o + 1) * n_in];
                for (g, ai) in row.iter_mut().zip(a) {
                    *g += d * ai;
                }
                grad[off + n_in * n_out + o] += d;
            }
            if l > 0 {
                let w = &self.params[off..off + n_in * n_out];
                let z = &trace.pre[l - 1];
                delta = (0..n_in)
                    .map(|i| {
                        let back: f64 = (0..n_out).map(|o| w[o * n_in + i] * delta[o]).sum();
                        back * self.act_grad(z[i])
                    })
                    .collect();
            }
        }
        trace.output
    }
}

/// Untrained network with seeded Glorot-uniform weights.
pub fn random_scorer(dim: usize, spec: &MlpSpec, seed: u64) -> Result<Scorer> {
    spec.validate(dim)?;
    let mut rng = seeded_rng(seed);
    let net = Mlp::init(spec, &mut rng);
    Ok(Scorer::new(ScorerKind::Random, Model::Network { net, divisor: None }, None, dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_grad(net: &Mlp, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..net.params.len())
            .map(|i| {
                let mut p = net.clone();
                p.params[i] += h;
                let up = p.forward(x);
                p.params[i] -= 2.0 * h;
                let down = p.forward(x);
                (up - down) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let spec = MlpSpec::new(vec![3, 5, 4, 1], Activation::Tanh);
        let net = Mlp::init(&spec, &mut seeded_rng(3));
        let x = [0.3, -1.1, 0.8];
        let mut g = vec![0.0; net.params.len()];
        let out = net.accumulate_grad(&x, 1.0, &mut g);
        assert_eq!(out, net.forward(&x));
        for (a, b) in g.iter().zip(numeric_grad(&net, &x)) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn glorot_bounds_and_layout() {
        let spec = MlpSpec::new(vec![2, 16, 1], Activation::Relu);
        let net = Mlp::init(&spec, &mut seeded_rng(1));
        assert_eq!(net.params.len(), 16 * 3 + 17);
        let limit = (6.0f64 / 18.0).sqrt();
        assert!(net.params[..32].iter().all(|w| w.abs() <= limit));
        assert!(net.params[32..48].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn random_scorer_is_seeded() {
        let spec = MlpSpec::with_hidden(2, &[8], Activation::Tanh);
        let a = random_scorer(2, &spec, 5).unwrap();
        let b = random_scorer(2, &spec, 5).unwrap();
        let c = random_scorer(2, &spec, 6).unwrap();
        let probes = [[0.5, -0.2], [3.0, 1.0], [-2.0, 0.7]];
        for p in &probes {
            assert_eq!(a.score(p).to_bits(), b.score(p).to_bits());
        }
        assert!(probes.iter().any(|p| a.score(p) != c.score(p)));
        assert!(random_scorer(3, &spec, 5).is_err());
    }
}
