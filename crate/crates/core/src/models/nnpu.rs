use serde::{Deserialize, Serialize};

use super::config::{MlpSpec, TrainConfig};
use super::mlp::{Mlp, MlpGrad};
use super::scorer::{Model, Scorer, ScorerKind};
use super::sgd::{PairedBatches, Sgd};
use super::standardize::Standardizer;
use crate::data::{seeded_rng, DataPoint, PuData};
use crate::error::{PuError, Result};
use crate::math::{loss_grad, risk_nn, ClassCode, ClassPrior, LossKind, RiskBreakdown};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NnpuOptions {
    /// When the negative term goes below zero, step up its gradient instead
    /// of dropping it.
    pub defensive: bool,
    pub standardize: bool,
}

impl Default for NnpuOptions {
    fn default() -> Self {
        NnpuOptions {
            defensive: false,
            standardize: true,
        }
    }
}

const LOSS: LossKind = LossKind::Sigmoid;

/// Non-negative risk of `net` on the two samples with the sigmoid loss and
/// its gradient. Through an active clamp only the positive term contributes.
pub fn nn_risk_and_grad(
    net: &Mlp,
    positives: &[DataPoint],
    unlabeled: &[DataPoint],
    alpha: ClassPrior,
) -> Result<(RiskBreakdown, MlpGrad)> {
    let xp: Vec<&[f64]> = positives.iter().map(|p| p.coords()).collect();
    let xu: Vec<&[f64]> = unlabeled.iter().map(|p| p.coords()).collect();
    batch_risk_and_grad(net, &xp, &xu, alpha, false)
}

fn batch_risk_and_grad(
    net: &Mlp,
    xp: &[&[f64]],
    xu: &[&[f64]],
    alpha: ClassPrior,
    defensive: bool,
) -> Result<(RiskBreakdown, MlpGrad)> {
    if xp.is_empty() || xu.is_empty() {
        return Err(PuError::Empty("positive or unlabeled sample"));
    }
    let a = alpha.value();
    let tp: Vec<f64> = xp.iter().map(|x| net.forward(x)).collect();
    let tu: Vec<f64> = xu.iter().map(|x| net.forward(x)).collect();
    let risk = risk_nn(LOSS, &tp, &tu, alpha)?;
    let mut grad = vec![0.0; net.params.len()];
    let wp = a / xp.len() as f64;
    let wu = 1.0 / xu.len() as f64;
    // (weight on the positive term, weight on the negative term)
    let (pos_w, neg_w) = match (risk.clamped, defensive) {
        (false, _) => (1.0, 1.0),
        (true, false) => (1.0, 0.0),
        // ascend the negative term alone
        (true, true) => (0.0, -1.0),
    };
    for (x, &t) in xp.iter().zip(&tp) {
        let d = wp * (pos_w * loss_grad(LOSS, ClassCode::Positive, t) - neg_w * loss_grad(LOSS, ClassCode::Negative, t));
        net.accumulate_grad(x, d, &mut grad);
    }
    if neg_w != 0.0 {
        for (x, &t) in xu.iter().zip(&tu) {
            net.accumulate_grad(x, neg_w * wu * loss_grad(LOSS, ClassCode::Negative, t), &mut grad);
        }
    }
    Ok((risk, grad))
}

pub fn train_nnpu_mlp(data: &PuData, alpha: ClassPrior, spec: &MlpSpec, config: &TrainConfig) -> Result<Scorer> {
    train_nnpu_mlp_with(data, alpha, spec, config, &NnpuOptions::default())
}

/// Trains a network on the non-negative PU risk with the sigmoid loss.
pub fn train_nnpu_mlp_with(
    data: &PuData,
    alpha: ClassPrior,
    spec: &MlpSpec,
    config: &TrainConfig,
    opts: &NnpuOptions,
) -> Result<Scorer> {
    data.require_both()?;
    spec.validate(data.dim)?;
    config.validate()?;
    let standardizer = opts
        .standardize
        .then(|| Standardizer::fit(data.positive.iter().chain(&data.unlabeled), data.dim));
    let prep = |xs: &[DataPoint]| -> Vec<Vec<f64>> {
        match &standardizer {
            Some(s) => s.apply_all(xs),
            None => xs.iter().map(|x| x.to_vec()).collect(),
        }
    };
    let xp = prep(&data.positive);
    let xu = prep(&data.unlabeled);

    let mut rng = seeded_rng(config.seed);
    let mut net = Mlp::init(spec, &mut rng);
    let mut sgd = Sgd::new(config, net.params.len());
    let mut batches = PairedBatches::new(xp.len(), xu.len(), config.batch_size);
    let steps = batches.steps();
    for _ in 0..config.epochs {
        batches.shuffle(&mut rng);
        for s in 0..steps {
            let (pb, ub) = batches.batch(s);
            let bp: Vec<&[f64]> = pb.iter().map(|&i| xp[i].as_slice()).collect();
            let bu: Vec<&[f64]> = ub.iter().map(|&i| xu[i].as_slice()).collect();
            let (_, mut grad) = batch_risk_and_grad(&net, &bp, &bu, alpha, opts.defensive)?;
            for (g, p) in grad.iter_mut().zip(&net.params) {
                *g += config.lambda * p;
            }
            sgd.step(&mut net.params, &grad);
        }
        sgd.end_epoch();
    }
    if net.params.iter().any(|p| !p.is_finite()) {
        return Err(PuError::NonFinite("nnPU parameters diverged"));
    }
    Ok(Scorer::new(
        ScorerKind::Nnpu,
        Model::Network { net, divisor: None },
        standardizer,
        data.dim,
    ))
}
