use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dataset::{PuData, PuDataset};
use super::point::DataPoint;
use super::rng::{derive_seed, seeded_rng, Rng};
use crate::error::{invalid, PuError, Result};

/// One axis-aligned Gaussian component of a class distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMode {
    pub mean: Vec<f64>,
    /// Diagonal of the covariance matrix.
    pub var: Vec<f64>,
    pub weight: f64,
}

impl GaussianMode {
    pub fn isotropic(mean: Vec<f64>, var: f64, weight: f64) -> Self {
        let d = mean.len();
        GaussianMode {
            mean,
            var: vec![var; d],
            weight,
        }
    }
}

/// Parameters of a synthetic PU scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub positive_modes: Vec<GaussianMode>,
    pub negative_modes: Vec<GaussianMode>,
    pub n_pos_labeled: usize,
    pub n_unlabeled: usize,
    pub alpha: f64,
    /// Negative distribution at test time; `None` means no shift.
    #[serde(default)]
    pub test_negative_modes: Option<Vec<GaussianMode>>,
    pub n_test_per_class: usize,
    pub seed: u64,
}

/// Training data plus labeled test points.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub train: PuDataset,
    pub test_pos: Vec<DataPoint>,
    pub test_neg: Vec<DataPoint>,
}

impl ScenarioSpec {
    /// Two unit Gaussians: positives at the origin, negatives at (4, 0).
    pub fn fig1(seed: u64) -> Self {
        ScenarioSpec {
            positive_modes: vec![GaussianMode::isotropic(vec![0.0, 0.0], 1.0, 1.0)],
            negative_modes: vec![GaussianMode::isotropic(vec![4.0, 0.0], 1.0, 1.0)],
            n_pos_labeled: 1000,
            n_unlabeled: 2000,
            alpha: 0.5,
            test_negative_modes: None,
            n_test_per_class: 1000,
            seed,
        }
    }

    /// `fig1` with test negatives moved to the far side of the positives, (-4, 0).
    pub fn fig1_shift(seed: u64) -> Self {
        ScenarioSpec {
            test_negative_modes: Some(vec![GaussianMode::isotropic(vec![-4.0, 0.0], 1.0, 1.0)]),
            ..Self::fig1(seed)
        }
    }

    /// Positives in four modes at (+-4, +-4), negatives between them at the origin.
    pub fn fig3(seed: u64) -> Self {
        let corners = [(4.0, 4.0), (4.0, -4.0), (-4.0, 4.0), (-4.0, -4.0)];
        ScenarioSpec {
            positive_modes: corners
                .iter()
                .map(|&(x, y)| GaussianMode::isotropic(vec![x, y], 1.0, 0.25))
                .collect(),
            negative_modes: vec![GaussianMode::isotropic(vec![0.0, 0.0], 1.0, 1.0)],
            n_pos_labeled: 1000,
            n_unlabeled: 2000,
            alpha: 0.5,
            test_negative_modes: None,
            n_test_per_class: 1000,
            seed,
        }
    }

    pub fn dim(&self) -> usize {
        self.positive_modes.first().map_or(0, |m| m.mean.len())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1], got {}", self.alpha)));
        }
        if self.n_pos_labeled == 0 || self.n_unlabeled == 0 || self.n_test_per_class == 0 {
            return Err(invalid("sample sizes", "all sample sizes must be positive"));
        }
        let dim = self.dim();
        if dim == 0 {
            return Err(invalid("positive_modes", "at least one mode with a non-empty mean"));
        }
        validate_modes("positive_modes", &self.positive_modes, dim)?;
        validate_modes("negative_modes", &self.negative_modes, dim)?;
        if let Some(t) = &self.test_negative_modes {
            validate_modes("test_negative_modes", t, dim)?;
        }
        Ok(())
    }
}

impl ScenarioSpec {
    /// Fresh labeled-positive draw, independent of the training split.
    pub fn draw_positive(&self, n: usize, seed: u64) -> Result<Vec<DataPoint>> {
        self.validate()?;
        Ok(sample_mixture(&self.positive_modes, n, &mut seeded_rng(seed)))
    }

    /// Fresh unlabeled draw: each point is positive with probability `alpha`.
    /// With `test_time`, negatives come from the test negative modes when set.
    pub fn draw_unlabeled(&self, n: usize, test_time: bool, seed: u64) -> Result<Vec<DataPoint>> {
        self.validate()?;
        let mut rng = seeded_rng(seed);
        let n_pos = Binomial::new(n as u64, self.alpha)
            .map_err(|e| invalid("alpha", e.to_string()))?
            .sample(&mut rng) as usize;
        let neg_modes = match (&self.test_negative_modes, test_time) {
            (Some(t), true) => t.as_slice(),
            _ => &self.negative_modes,
        };
        let mut out = sample_mixture(&self.positive_modes, n_pos, &mut rng);
        out.extend(sample_mixture(neg_modes, n - n_pos, &mut rng));
        out.shuffle(&mut rng);
        Ok(out)
    }
}

fn validate_modes(name: &'static str, modes: &[GaussianMode], dim: usize) -> Result<()> {
    if modes.is_empty() {
        return Err(invalid(name, "no modes"));
    }
    for m in modes {
        if m.mean.len() != dim || m.var.len() != dim {
            return Err(PuError::DimensionMismatch {
                expected: dim,
                got: m.mean.len().max(m.var.len()),
            });
        }
        if m.mean.iter().any(|v| !v.is_finite()) {
            return Err(PuError::NonFinite(name));
        }
        if m.var.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(invalid(name, "covariance entries must be positive"));
        }
        if !(m.weight.is_finite() && m.weight > 0.0) {
            return Err(invalid(name, "mode weights must be positive"));
        }
    }
    let total: f64 = modes.iter().map(|m| m.weight).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(name, format!("mode weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Draws `n` points from a diagonal Gaussian mixture.
pub fn sample_mixture(modes: &[GaussianMode], n: usize, rng: &mut Rng) -> Vec<DataPoint> {
    let picker = WeightedIndex::new(modes.iter().map(|m| m.weight)).expect("validated mode weights");
    (0..n)
        .map(|_| {
            let m = &modes[picker.sample(rng)];
            let coords = m
                .mean
                .iter()
                .zip(&m.var)
                .map(|(mu, v)| {
                    let z: f64 = rng.sample(StandardNormal);
                    mu + v.sqrt() * z
                })
                .collect();
            DataPoint::from_vec_unchecked(coords)
        })
        .collect()
}

/// Case-control sampling under SCAR.
///
/// Labeled positives are drawn uniformly from `pos_pool`; the unlabeled set
/// holds `Binomial(n_unlabeled, alpha)` further positives and negatives for
/// the rest, all without replacement, shuffled.
pub fn scar_sample(
    pos_pool: &[DataPoint],
    neg_pool: &[DataPoint],
    n_labeled: usize,
    n_unlabeled: usize,
    alpha: f64,
    seed: u64,
) -> Result<PuDataset> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    if n_labeled == 0 || n_unlabeled == 0 {
        return Err(invalid("sample sizes", "labeled and unlabeled counts must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let n_pos_unl = Binomial::new(n_unlabeled as u64, alpha)
        .map_err(|e| invalid("alpha", e.to_string()))?
        .sample(&mut rng) as usize;
    let n_neg_unl = n_unlabeled - n_pos_unl;
    if pos_pool.len() < n_labeled + n_pos_unl {
        return Err(PuError::InsufficientData(format!(
            "positive pool has {} points, need {}",
            pos_pool.len(),
            n_labeled + n_pos_unl
        )));
    }
    if neg_pool.len() < n_neg_unl {
        return Err(PuError::InsufficientData(format!(
            "negative pool has {} points, need {}",
            neg_pool.len(),
            n_neg_unl
        )));
    }

    let pos_idx = index::sample(&mut rng, pos_pool.len(), n_labeled + n_pos_unl).into_vec();
    let neg_idx = index::sample(&mut rng, neg_pool.len(), n_neg_unl).into_vec();
    let positive: Vec<DataPoint> = pos_idx[..n_labeled].iter().map(|&i| pos_pool[i].clone()).collect();
    let mut unl: Vec<(DataPoint, u8)> = pos_idx[n_labeled..]
        .iter()
        .map(|&i| (pos_pool[i].clone(), 1))
        .chain(neg_idx.iter().map(|&i| (neg_pool[i].clone(), 0)))
        .collect();
    unl.shuffle(&mut rng);
    let (unlabeled, latent): (Vec<_>, Vec<_>) = unl.into_iter().unzip();

    PuDataset::new(PuData::new(positive, unlabeled)?, Some(latent), Some(alpha))
}

fn generate(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let mut pool_rng = seeded_rng(derive_seed(spec.seed, &[0]));
    let pos_pool = sample_mixture(&spec.positive_modes, spec.n_pos_labeled + spec.n_unlabeled, &mut pool_rng);
    let neg_pool = sample_mixture(&spec.negative_modes, spec.n_unlabeled, &mut pool_rng);
    let train = scar_sample(
        &pos_pool,
        &neg_pool,
        spec.n_pos_labeled,
        spec.n_unlabeled,
        spec.alpha,
        derive_seed(spec.seed, &[1]),
    )?;

    let mut test_rng = seeded_rng(derive_seed(spec.seed, &[2]));
    let test_pos = sample_mixture(&spec.positive_modes, spec.n_test_per_class, &mut test_rng);
    let neg_modes = spec.test_negative_modes.as_deref().unwrap_or(&spec.negative_modes);
    let test_neg = sample_mixture(neg_modes, spec.n_test_per_class, &mut test_rng);
    Ok(Scenario {
        train,
        test_pos,
        test_neg,
    })
}

/// One positive and one negative Gaussian, with an optional test-time
/// negative shift.
pub fn gen_two_gaussian_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    if spec.positive_modes.len() != 1 || spec.negative_modes.len() != 1 {
        return Err(invalid(
            "scenario",
            "two-Gaussian scenario needs exactly one positive and one negative mode",
        ));
    }
    generate(spec)
}

/// Multimodal positive class; negatives anywhere.
pub fn gen_multimodal_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    if spec.positive_modes.is_empty() {
        return Err(invalid("positive_modes", "no modes"));
    }
    generate(spec)
}
