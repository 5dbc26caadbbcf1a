use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::sgd::{PairedBatches, Sgd};
use super::scorer::{Model, Scorer, ScorerKind};
use super::standardize::Standardizer;
use crate::data::rng::Rng;
use crate::data::{seeded_rng, DataPoint, PuData};
use crate::error::{invalid, PuError, Result};
use crate::math::{loss_grad, risk_nn, risk_pu_unbiased, ClassCode, ClassPrior, Kernel, LossKind};

/// How the SVM decision function is parameterized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvmParam {
    /// `K(w, x) - b` with `w` living in input space.
    KernelWeight,
    /// `sum_j beta_j K(z_j, x) - b` over landmark points `z_j` drawn from the
    /// training data, penalized by `lambda * beta' K_zz beta`.
    Expansion { landmarks: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuSvmOptions {
    pub kernel: Kernel,
    pub param: SvmParam,
    /// Optimize the unbiased objective instead of the non-negative one.
    pub unclamped: bool,
    pub standardize: bool,
}

impl Default for PuSvmOptions {
    fn default() -> Self {
        PuSvmOptions {
            kernel: Kernel::Linear,
            param: SvmParam::KernelWeight,
            unclamped: false,
            standardize: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcSvmOptions {
    pub kernel: Kernel,
    pub standardize: bool,
}

impl Default for OcSvmOptions {
    fn default() -> Self {
        OcSvmOptions {
            kernel: Kernel::Linear,
            standardize: false,
        }
    }
}

/// Training points together with the chosen parameterization.
enum Design {
    Weight {
        kernel: Kernel,
        points: Vec<Vec<f64>>,
    },
    Expansion {
        kernel: Kernel,
        centers: Vec<Vec<f64>>,
        /// `features[i][j] = K(z_j, x_i)`
        features: Vec<Vec<f64>>,
        gram: Vec<Vec<f64>>,
    },
}

impl Design {
    fn n_params(&self, dim: usize) -> usize {
        match self {
            Design::Weight { .. } => dim,
            Design::Expansion { centers, .. } => centers.len(),
        }
    }

    fn margin(&self, theta: &[f64], i: usize) -> f64 {
        match self {
            Design::Weight { kernel, points } => kernel.apply(theta, &points[i]),
            Design::Expansion { features, .. } => dot(theta, &features[i]),
        }
    }

    fn add_grad(&self, theta: &[f64], i: usize, scale: f64, out: &mut [f64]) {
        match self {
            Design::Weight { kernel, points } => kernel.accumulate_grad_w(theta, &points[i], scale, out),
            Design::Expansion { features, .. } => {
                for (o, f) in out.iter_mut().zip(&features[i]) {
                    *o += scale * f;
                }
            }
        }
    }

    /// Gradient of `||w||^2` in feature space, scaled.
    fn add_reg_grad(&self, theta: &[f64], scale: f64, out: &mut [f64]) {
        match self {
            Design::Weight { .. } => {
                for (o, t) in out.iter_mut().zip(theta) {
                    *o += 2.0 * scale * t;
                }
            }
            Design::Expansion { gram, .. } => {
                for (o, row) in out.iter_mut().zip(gram) {
                    *o += 2.0 * scale * dot(row, theta);
                }
            }
        }
    }

    fn into_model(self, theta: Vec<f64>, offset: f64) -> Model {
        match self {
            Design::Weight { kernel, .. } => Model::KernelWeight {
                kernel,
                weight: theta,
                offset,
            },
            Design::Expansion { kernel, centers, .. } => Model::Expansion {
                kernel,
                centers,
                coef: theta,
                offset,
            },
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn build_design(kernel: Kernel, param: SvmParam, points: Vec<Vec<f64>>, rng: &mut Rng) -> Result<Design> {
    match param {
        SvmParam::KernelWeight => Ok(Design::Weight { kernel, points }),
        SvmParam::Expansion { landmarks } => {
            if landmarks == 0 {
                return Err(invalid("landmarks", "must be positive"));
            }
            let m = landmarks.min(points.len());
            let centers: Vec<Vec<f64>> = index::sample(rng, points.len(), m)
                .into_iter()
                .map(|i| points[i].clone())
                .collect();
            let features = points
                .iter()
                .map(|x| centers.iter().map(|c| kernel.apply(c, x)).collect())
                .collect();
            let gram = centers
                .iter()
                .map(|a| centers.iter().map(|b| kernel.apply(a, b)).collect())
                .collect();
            Ok(Design::Expansion {
                kernel,
                centers,
                features,
                gram,
            })
        }
    }
}

fn prepare(points: &[&DataPoint], standardize: bool, dim: usize) -> (Option<Standardizer>, Vec<Vec<f64>>) {
    if standardize {
        let s = Standardizer::fit(points.iter().copied(), dim);
        let xs = points.iter().map(|p| s.apply(p)).collect();
        (Some(s), xs)
    } else {
        (None, points.iter().map(|p| p.to_vec()).collect())
    }
}

pub fn train_oc_svm(positives: &[DataPoint], nu: f64, config: &TrainConfig) -> Result<Scorer> {
    train_oc_svm_with(positives, nu, config, &OcSvmOptions::default())
}

/// One-class SVM by SGD on `1/2 ||w||^2 - r + 1/(nu N) sum max(0, r - K(w, x_i))`.
///
/// The score is `K(w, x) - r`.
pub fn train_oc_svm_with(
    positives: &[DataPoint],
    nu: f64,
    config: &TrainConfig,
    opts: &OcSvmOptions,
) -> Result<Scorer> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(invalid("nu", format!("must lie in (0, 1), got {nu}")));
    }
    if positives.len() < 2 {
        return Err(PuError::InsufficientData("one-class SVM needs at least 2 points".into()));
    }
    config.validate()?;
    let dim = positives[0].dim();
    crate::data::check_dims(positives, dim)?;
    let refs: Vec<&DataPoint> = positives.iter().collect();
    let (standardizer, xs) = prepare(&refs, opts.standardize, dim);
    let mut rng = seeded_rng(config.seed);
    let design = build_design(opts.kernel, SvmParam::KernelWeight, xs, &mut rng)?;

    let n = positives.len();
    let p = design.n_params(dim);
    // params = [theta..., r]
    let mut params = vec![0.0; p + 1];
    let mut sgd = Sgd::new(config, p + 1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut grad = vec![0.0; p + 1];
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let (theta, r) = params.split_at(p);
            let r = r[0];
            let scale = 1.0 / (nu * batch.len() as f64);
            let mut active = 0usize;
            for &i in batch {
                if r - design.margin(theta, i) > 0.0 {
                    active += 1;
                    design.add_grad(theta, i, -scale, &mut grad[..p]);
                }
            }
            for (g, t) in grad[..p].iter_mut().zip(theta) {
                *g += t;
            }
            grad[p] = -1.0 + active as f64 * scale;
            sgd.step(&mut params, &grad);
        }
        sgd.end_epoch();
    }
    let r = params.pop().unwrap();
    Ok(Scorer::new(ScorerKind::OcSvm, design.into_model(params, r), standardizer, dim))
}

pub fn train_pu_svm_sgd(data: &PuData, alpha: ClassPrior, kernel: Kernel, config: &TrainConfig) -> Result<Scorer> {
    let opts = PuSvmOptions {
        kernel,
        ..PuSvmOptions::default()
    };
    train_pu_svm_sgd_with(data, alpha, config, &opts)
}

/// PU-SVM by mini-batch SGD on
/// `lambda ||w||^2 + alpha E_p l(+1, t) + max(0, E_u l(-1, t) - alpha E_p l(-1, t))`
/// with the double hinge loss and `t = <w, phi(x)> - b`.
///
/// When the clamp is active on a batch only the positive term (and the
/// penalty) contributes to the gradient.
pub fn train_pu_svm_sgd_with(
    data: &PuData,
    alpha: ClassPrior,
    config: &TrainConfig,
    opts: &PuSvmOptions,
) -> Result<Scorer> {
    data.require_both()?;
    config.validate()?;
    let dim = data.dim;
    let a = alpha.value();
    let n_p = data.positive.len();
    let n_u = data.unlabeled.len();
    let refs: Vec<&DataPoint> = data.positive.iter().chain(&data.unlabeled).collect();
    let (standardizer, xs) = prepare(&refs, opts.standardize, dim);
    let mut rng = seeded_rng(config.seed);
    let design = build_design(opts.kernel, opts.param, xs, &mut rng)?;
    let p = design.n_params(dim);

    let mut params = vec![0.0; p + 1];
    let mut sgd = Sgd::new(config, p + 1);
    let mut grad = vec![0.0; p + 1];
    let mut batches = PairedBatches::new(n_p, n_u, config.batch_size);
    let steps = batches.steps();
    let mut tp = Vec::with_capacity(config.batch_size);
    let mut tu = Vec::with_capacity(config.batch_size);
    for _ in 0..config.epochs {
        batches.shuffle(&mut rng);
        for s in 0..steps {
            let (pb, ub) = batches.batch(s);
            let ub: Vec<usize> = ub.into_iter().map(|i| i + n_p).collect();
            let (theta, b) = params.split_at(p);
            let b = b[0];
            tp.clear();
            tp.extend(pb.iter().map(|&i| design.margin(theta, i) - b));
            tu.clear();
            tu.extend(ub.iter().map(|&i| design.margin(theta, i) - b));

            let loss = LossKind::DoubleHinge;
            let include_neg = if opts.unclamped {
                risk_pu_unbiased(loss, &tp, &tu, alpha)?;
                true
            } else {
                !risk_nn(loss, &tp, &tu, alpha)?.clamped
            };

            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut db = 0.0;
            let wp = a / pb.len() as f64;
            for (&i, &t) in pb.iter().zip(&tp) {
                let mut c = wp * loss_grad(loss, ClassCode::Positive, t);
                if include_neg {
                    c -= wp * loss_grad(loss, ClassCode::Negative, t);
                }
                if c != 0.0 {
                    design.add_grad(theta, i, c, &mut grad[..p]);
                    db -= c;
                }
            }
            if include_neg {
                let wu = 1.0 / ub.len() as f64;
                for (&i, &t) in ub.iter().zip(&tu) {
                    let c = wu * loss_grad(loss, ClassCode::Negative, t);
                    if c != 0.0 {
                        design.add_grad(theta, i, c, &mut grad[..p]);
                        db -= c;
                    }
                }
            }
            design.add_reg_grad(theta, config.lambda, &mut grad[..p]);
            grad[p] = db;
            sgd.step(&mut params, &grad);
        }
        sgd.end_epoch();
    }
    let b = params.pop().unwrap();
    Ok(Scorer::new(ScorerKind::PuSvm, design.into_model(params, b), standardizer, dim))
}
