use super::config::TrainConfig;

/// Plain SGD with heavy-ball momentum and per-epoch learning-rate decay.
pub(crate) struct Sgd {
    lr: f64,
    momentum: f64,
    decay: f64,
    vel: Vec<f64>,
}

impl Sgd {
    pub(crate) fn new(config: &TrainConfig, n_params: usize) -> Self {
        Sgd {
            lr: config.learning_rate,
            momentum: config.momentum,
            decay: config.lr_decay,
            vel: vec![0.0; n_params],
        }
    }

    pub(crate) fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        for ((p, v), g) in params.iter_mut().zip(self.vel.iter_mut()).zip(grad) {
            *v = self.momentum * *v - self.lr * g;
            *p += *v;
        }
    }

    pub(crate) fn end_epoch(&mut self) {
        self.lr *= self.decay;
    }
}

/// Mini-batch index streams over two samples. Each epoch covers the larger
/// sample once; the smaller one wraps around.
pub(crate) struct PairedBatches {
    pub(crate) first: Vec<usize>,
    pub(crate) second: Vec<usize>,
    pub(crate) batch_size: usize,
}

impl PairedBatches {
    pub(crate) fn new(n_first: usize, n_second: usize, batch_size: usize) -> Self {
        PairedBatches {
            first: (0..n_first).collect(),
            second: (0..n_second).collect(),
            batch_size,
        }
    }

    pub(crate) fn shuffle(&mut self, rng: &mut crate::data::rng::Rng) {
        use rand::seq::SliceRandom;
        self.first.shuffle(rng);
        self.second.shuffle(rng);
    }

    pub(crate) fn steps(&self) -> usize {
        self.first
            .len()
            .div_ceil(self.batch_size)
            .max(self.second.len().div_ceil(self.batch_size))
    }

    pub(crate) fn batch(&self, step: usize) -> (Vec<usize>, Vec<usize>) {
        let take = |order: &[usize]| -> Vec<usize> {
            let n = order.len();
            (0..self.batch_size.min(n))
                .map(|k| order[(step * self.batch_size + k) % n])
                .collect()
        };
        (take(&self.first), take(&self.second))
    }
}
