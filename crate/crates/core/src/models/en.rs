use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{MlpSpec, TrainConfig};
use super::mlp::Mlp;
use super::scorer::{Model, Scorer, ScorerKind};
use super::sgd::Sgd;
use super::standardize::Standardizer;
use crate::data::{derive_seed, seeded_rng, PuData};
use crate::error::{invalid, PuError, Result};
use crate::math::{loss::sigmoid, loss_grad, ClassCode, LossKind};

/// Smallest number of held-out positives used to estimate `c`.
pub const MIN_HOLDOUT: usize = 10;

/// Elkan-Noto fit: the calibrated scorer and the estimated labeling frequency
/// `c = p(s = 1 | y = 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnFit {
    pub scorer: Scorer,
    pub c_hat: f64,
}

/// Trains `g(x) ~ p(s = 1 | x)` on labeled vs unlabeled with the logistic loss
/// and calibrates it by the mean of `g` over held-out positives.
///
/// The scorer returns `g(x) / c_hat`; `Scorer::posterior` clips it to `[0, 1]`.
pub fn train_en(data: &PuData, spec: &MlpSpec, config: &TrainConfig, holdout_fraction: f64) -> Result<EnFit> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(invalid("holdout_fraction", "must lie in (0, 1)"));
    }
    data.require_both()?;
    spec.validate(data.dim)?;
    config.validate()?;
    let n_p = data.positive.len();
    let n_hold = (holdout_fraction * n_p as f64).ceil() as usize;
    if n_hold < MIN_HOLDOUT || n_hold >= n_p {
        return Err(PuError::InsufficientData(format!(
            "{n_p} labeled positives leave a holdout of {n_hold}; need at least {MIN_HOLDOUT} and one for training"
        )));
    }
    let mut order: Vec<usize> = (0..n_p).collect();
    order.shuffle(&mut seeded_rng(derive_seed(config.seed, &[1])));
    let (hold_idx, train_idx) = order.split_at(n_hold);

    let train_pos: Vec<_> = train_idx.iter().map(|&i| &data.positive[i]).collect();
    let standardizer = Standardizer::fit(train_pos.iter().copied().chain(&data.unlabeled), data.dim);
    // (features, is_labeled)
    let pooled: Vec<(Vec<f64>, ClassCode)> = train_pos
        .iter()
        .map(|x| (standardizer.apply(x), ClassCode::Positive))
        .chain(data.unlabeled.iter().map(|x| (standardizer.apply(x), ClassCode::Negative)))
        .collect();

    let mut rng = seeded_rng(config.seed);
    let mut net = Mlp::init(spec, &mut rng);
    let mut sgd = Sgd::new(config, net.params.len());
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    let mut grad = vec![0.0; net.params.len()];
    for _ in 0..config.epochs {
        idx.shuffle(&mut rng);
        for batch in idx.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let w = 1.0 / batch.len() as f64;
            for &i in batch {
                let (x, y) = &pooled[i];
                let t = net.forward(x);
                net.accumulate_grad(x, w * loss_grad(LossKind::Logistic, *y, t), &mut grad);
            }
            for (g, p) in grad.iter_mut().zip(&net.params) {
                *g += config.lambda * p;
            }
            sgd.step(&mut net.params, &grad);
        }
        sgd.end_epoch();
    }
    if net.params.iter().any(|p| !p.is_finite()) {
        return Err(PuError::NonFinite("Elkan-Noto parameters diverged"));
    }

    let c_hat = hold_idx
        .iter()
        .map(|&i| sigmoid(net.forward(&standardizer.apply(&data.positive[i]))))
        .sum::<f64>()
        / n_hold as f64;
    if !(c_hat > 1e-6) {
        return Err(PuError::Calibration(format!("estimated labeling frequency {c_hat} is degenerate")));
    }
    let mut scorer = Scorer::new(
        ScorerKind::ElkanNoto,
        Model::Network {
            net,
            divisor: Some(c_hat),
        },
        Some(standardizer),
        data.dim,
    );
    scorer.emits_posterior = true;
    Ok(EnFit { scorer, c_hat })
}
