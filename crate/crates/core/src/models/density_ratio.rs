use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::scorer::{Model, Scorer, ScorerKind};
use super::standardize::Standardizer;
use crate::data::{derive_seed, seeded_rng, PuData};
use crate::error::{invalid, PuError, Result};
use crate::math::Kernel;

/// Floor on `r(x)` inside `1 / r(x)` when estimating the prior.
pub const RATIO_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DensityRatioOptions {
    /// Gaussian width in standardized units; `None` uses the median distance
    /// between basis centers.
    pub bandwidth: Option<f64>,
    pub ridge: f64,
    pub max_sweeps: usize,
}

impl Default for DensityRatioOptions {
    fn default() -> Self {
        DensityRatioOptions {
            bandwidth: None,
            ridge: 0.3,
            max_sweeps: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRatioFit {
    /// Scores `alpha_hat * r(x)`, an estimate of `p(y = 1 | x)`.
    pub scorer: Scorer,
    pub alpha_hat: f64,
    /// Fitted ratio `r(x) ~ p_p(x) / p_u(x)` without the prior factor.
    pub ratio: Scorer,
}

pub fn train_density_ratio(
    data: &PuData,
    basis_size: usize,
    config: &TrainConfig,
    holdout_fraction: f64,
) -> Result<DensityRatioFit> {
    train_density_ratio_with(data, basis_size, config, holdout_fraction, &DensityRatioOptions::default())
}

/// Least-squares density-ratio fit with nonnegative Gaussian basis weights,
/// followed by the prior estimate `min_v 1 / r(x_v)` over held-out unlabeled
/// points.
pub fn train_density_ratio_with(
    data: &PuData,
    basis_size: usize,
    config: &TrainConfig,
    holdout_fraction: f64,
    opts: &DensityRatioOptions,
) -> Result<DensityRatioFit> {
    if basis_size == 0 {
        return Err(invalid("basis_size", "must be positive"));
    }
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(invalid("holdout_fraction", "must lie in (0, 1)"));
    }
    data.require_both()?;
    let ridge = opts.ridge;
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(invalid("ridge", "must be nonnegative"));
    }
    let n_u = data.unlabeled.len();
    let n_hold = (holdout_fraction * n_u as f64).ceil() as usize;
    if n_hold == 0 || n_hold >= n_u {
        return Err(PuError::InsufficientData(format!(
            "{n_u} unlabeled points cannot be split with holdout fraction {holdout_fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..n_u).collect();
    order.shuffle(&mut seeded_rng(derive_seed(config.seed, &[1])));
    let (hold_idx, fit_idx) = order.split_at(n_hold);

    let standardizer = Standardizer::fit(data.positive.iter().chain(&data.unlabeled), data.dim);
    let xp = standardizer.apply_all(&data.positive);
    let xu: Vec<Vec<f64>> = fit_idx.iter().map(|&i| standardizer.apply(&data.unlabeled[i])).collect();
    let xv: Vec<Vec<f64>> = hold_idx.iter().map(|&i| standardizer.apply(&data.unlabeled[i])).collect();

    let m = basis_size.min(xu.len());
    let mut rng = seeded_rng(config.seed);
    let centers: Vec<Vec<f64>> = index::sample(&mut rng, xu.len(), m)
        .into_iter()
        .map(|i| xu[i].clone())
        .collect();
    let sigma = match opts.bandwidth {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(_) => return Err(invalid("bandwidth", "must be positive")),
        None => median_distance(&centers).max(1e-3),
    };
    let kernel = Kernel::rbf(1.0 / (2.0 * sigma * sigma))?;

    let design = |xs: &[Vec<f64>]| -> Vec<Vec<f64>> {
        xs.iter()
            .map(|x| centers.iter().map(|c| kernel.apply(c, x)).collect())
            .collect()
    };
    let phi_u = design(&xu);
    let phi_p = design(&xp);
    let mut hess = vec![vec![0.0; m]; m];
    for row in &phi_u {
        for a in 0..m {
            for b in a..m {
                hess[a][b] += row[a] * row[b];
            }
        }
    }
    let inv_u = 1.0 / xu.len() as f64;
    for a in 0..m {
        for b in a..m {
            hess[a][b] *= inv_u;
            hess[b][a] = hess[a][b];
        }
        hess[a][a] += ridge;
    }
    let inv_p = 1.0 / xp.len() as f64;
    let lin: Vec<f64> = (0..m).map(|l| phi_p.iter().map(|r| r[l]).sum::<f64>() * inv_p).collect();

    let theta = nonneg_quadratic(&hess, &lin, opts.max_sweeps);
    if theta.iter().all(|&t| t == 0.0) {
        return Err(PuError::Calibration("density-ratio fit is identically zero".into()));
    }

    let ratio_at = |x: &[f64]| -> f64 { centers.iter().zip(&theta).map(|(c, t)| t * kernel.apply(c, x)).sum() };
    let alpha_hat = xv
        .iter()
        .map(|x| 1.0 / ratio_at(x).max(RATIO_FLOOR))
        .fold(f64::INFINITY, f64::min)
        .clamp(0.0, 1.0);
    if !(alpha_hat > 0.0) {
        return Err(PuError::Calibration(format!("estimated prior {alpha_hat} is degenerate")));
    }

    let make = |scale: f64, kind: ScorerKind| -> Scorer {
        Scorer::new(
            kind,
            Model::Ratio {
                kernel,
                centers: centers.clone(),
                coef: theta.clone(),
                scale,
            },
            Some(standardizer.clone()),
            data.dim,
        )
    };
    let mut scorer = make(alpha_hat, ScorerKind::DensityRatio);
    scorer.emits_posterior = true;
    let ratio = make(1.0, ScorerKind::DensityRatio);
    Ok(DensityRatioFit {
        scorer,
        alpha_hat,
        ratio,
    })
}

fn median_distance(points: &[Vec<f64>]) -> f64 {
    let mut d = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d.push(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt());
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

/// Minimizes `1/2 t'Ht - h't` over `t >= 0` by cyclic coordinate descent.
fn nonneg_quadratic(hess: &[Vec<f64>], lin: &[f64], max_sweeps: usize) -> Vec<f64> {
    let m = lin.len();
    let mut t = vec![0.0; m];
    // grad = H t - h, kept up to date
    let mut grad: Vec<f64> = lin.iter().map(|v| -v).collect();
    for _ in 0..max_sweeps {
        let mut moved = 0.0f64;
        for l in 0..m {
            let hll = hess[l][l];
            if hll <= 0.0 {
                continue;
            }
            let next = (t[l] - grad[l] / hll).max(0.0);
            let delta = next - t[l];
            if delta != 0.0 {
                for (g, h) in grad.iter_mut().zip(&hess[l]) {
                    *g += delta * h;
                }
                t[l] = next;
                moved = moved.max(delta.abs() * (1.0 + next.abs()).recip());
            }
        }
        if moved < 1e-12 {
            break;
        }
    }
    t
}
