use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use puoc::data::{GaussianMode, ScenarioSpec};

use crate::builtin;
use crate::error::{config_err, BenchError, Result};
use crate::model::ModelEntry;

/// Where the data of each run comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    /// A named scenario (`fig1`, `fig1-shift`, `fig3`, `alpha-sweep`, `size-sweep`).
    Builtin(String),
    Spec(ScenarioSpec),
    /// Fixed files; repeats only vary the training seed.
    Csv { train: PathBuf, test: PathBuf },
}

/// One varied parameter; each value is a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    Alpha(Vec<f64>),
    UnlabeledSize(Vec<usize>),
    Shift(Vec<bool>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::Alpha(v) => v.len(),
            Sweep::UnlabeledSize(v) => v.len(),
            Sweep::Shift(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numeric value of cell `i`, for plotting.
    pub fn value(&self, i: usize) -> f64 {
        match self {
            Sweep::Alpha(v) => v[i],
            Sweep::UnlabeledSize(v) => v[i] as f64,
            Sweep::Shift(v) => v[i] as u8 as f64,
        }
    }

    pub fn axis(&self) -> &'static str {
        match self {
            Sweep::Alpha(_) => "alpha",
            Sweep::UnlabeledSize(_) => "unlabeled_size",
            Sweep::Shift(_) => "shift",
        }
    }

    /// `spec` with cell `i` applied.
    pub fn apply(&self, spec: &ScenarioSpec, i: usize) -> ScenarioSpec {
        let mut out = spec.clone();
        match self {
            Sweep::Alpha(v) => out.alpha = v[i],
            Sweep::UnlabeledSize(v) => out.n_unlabeled = v[i],
            Sweep::Shift(v) => {
                out.test_negative_modes = match (v[i], &spec.test_negative_modes) {
                    (false, _) => None,
                    (true, Some(t)) => Some(t.clone()),
                    (true, None) => Some(mirrored_negatives(spec)),
                }
            }
        }
        out
    }
}

/// Negative modes reflected through the positive mean.
fn mirrored_negatives(spec: &ScenarioSpec) -> Vec<GaussianMode> {
    let dim = spec.dim();
    let mut center = vec![0.0; dim];
    for m in &spec.positive_modes {
        for (c, v) in center.iter_mut().zip(&m.mean) {
            *c += m.weight * v;
        }
    }
    spec.negative_modes
        .iter()
        .map(|m| GaussianMode {
            mean: m.mean.iter().zip(&center).map(|(v, c)| 2.0 * c - v).collect(),
            ..m.clone()
        })
        .collect()
}

/// Optional reliability checks run after training each model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionConfig {
    /// Size of each fresh sample fed to the tests.
    pub sample_size: usize,
    /// Fixed threshold; `None` calibrates it on a same-distribution split.
    pub p_crit: Option<f64>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            sample_size: 200,
            p_crit: None,
        }
    }
}

fn ten() -> usize {
    10
}

fn default_output() -> PathBuf {
    PathBuf::from("results.jsonl")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSource,
    pub models: Vec<ModelEntry>,
    #[serde(default = "ten")]
    pub repeats: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub detection: Option<DetectionConfig>,
    /// Results file, one JSON record per line.
    #[serde(default = "default_output")]
    pub output_path: PathBuf,
    /// Optional flat CSV projection of the results.
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
    /// Store wall-clock training time; off keeps result files reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            BenchError::Config(m) => config_err(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Number of sweep cells (1 without a sweep).
    pub fn cells(&self) -> usize {
        self.sweep.as_ref().map_or(1, Sweep::len)
    }

    /// Base scenario for synthetic sources.
    pub fn base_spec(&self) -> Result<Option<ScenarioSpec>> {
        match &self.scenario {
            ScenarioSource::Builtin(name) => Ok(Some(builtin::scenario(name, 0)?)),
            ScenarioSource::Spec(s) => Ok(Some(s.clone())),
            ScenarioSource::Csv { .. } => Ok(None),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(config_err("repeats must be at least 1"));
        }
        if self.models.is_empty() {
            return Err(config_err("no models"));
        }
        let mut ids: Vec<&str> = self.models.iter().map(|m| m.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(config_err(format!("duplicate model id `{}`", w[0])));
        }
        if ids.iter().any(|id| id.is_empty()) {
            return Err(config_err("empty model id"));
        }
        let base = self.base_spec()?;
        if let Some(spec) = &base {
            spec.validate()?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(config_err("sweep has no values"));
            }
            let Some(spec) = &base else {
                return Err(config_err("sweeps need a synthetic scenario"));
            };
            match sweep {
                Sweep::Alpha(v) => {
                    if let Some(a) = v.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
                        return Err(config_err(format!("sweep alpha {a} outside (0, 1]")));
                    }
                }
                Sweep::UnlabeledSize(v) => {
                    if v.contains(&0) {
                        return Err(config_err("sweep unlabeled_size must be positive"));
                    }
                }
                Sweep::Shift(_) => {}
            }
            for i in 0..sweep.len() {
                sweep.apply(spec, i).validate()?;
            }
        }
        if let Some(d) = &self.detection {
            if base.is_none() {
                return Err(config_err("detection needs a synthetic scenario"));
            }
            if d.sample_size < puoc::reliability::MIN_CALIBRATION_SAMPLE {
                return Err(config_err(format!(
                    "detection sample_size must be at least {}",
                    puoc::reliability::MIN_CALIBRATION_SAMPLE
                )));
            }
            if let Some(p) = d.p_crit {
                if !(0.0..=1.0).contains(&p) {
                    return Err(config_err("detection p_crit outside [0, 1]"));
                }
            }
        }
        Ok(())
    }
}
