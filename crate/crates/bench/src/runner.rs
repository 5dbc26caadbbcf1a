use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use puoc::data::{
    derive_seed, gen_multimodal_scenario, gen_two_gaussian_scenario, load_csv_dataset, load_test_csv, CsvSchema,
    DataPoint, PuDataset, ScenarioSpec,
};
use puoc::models::Scorer;
use puoc::reliability::{calibrate_p_crit, detect_high_alpha, detect_negative_shift, ReliabilityVerdict};
use puoc::stats::roc_auc;

use crate::config::{DetectionConfig, ExperimentConfig, ScenarioSource};
use crate::error::{BenchError, Result};

/// Outcome of one model on one (cell, repeat).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub model: String,
    pub cell: usize,
    #[serde(default)]
    pub sweep_value: Option<f64>,
    pub repeat: usize,
    pub seed: u64,
    /// Test AUC; absent when the run failed.
    pub auc: Option<f64>,
    #[serde(default)]
    pub alpha_hat: Option<f64>,
    #[serde(default)]
    pub wall_time_ms: u64,
    #[serde(default)]
    pub verdicts: Option<Vec<ReliabilityVerdict>>,
    #[serde(default)]
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

struct RunData {
    train: PuDataset,
    alpha_true: Option<f64>,
    test_pos: Vec<DataPoint>,
    test_neg: Vec<DataPoint>,
    spec: Option<ScenarioSpec>,
}

fn generate(spec: &ScenarioSpec) -> puoc::Result<RunData> {
    let sc = if spec.positive_modes.len() == 1 && spec.negative_modes.len() == 1 {
        gen_two_gaussian_scenario(spec)?
    } else {
        gen_multimodal_scenario(spec)?
    };
    Ok(RunData {
        alpha_true: Some(spec.alpha),
        train: sc.train,
        test_pos: sc.test_pos,
        test_neg: sc.test_neg,
        spec: Some(spec.clone()),
    })
}

fn load_files(train: &Path, test: &Path) -> puoc::Result<RunData> {
    let schema = CsvSchema::default();
    let ds = load_csv_dataset(train, &schema)?;
    let (test_pos, test_neg) = load_test_csv(test, &schema)?;
    Ok(RunData {
        alpha_true: ds.alpha_true.or(ds.latent_positive_fraction()),
        train: ds,
        test_pos,
        test_neg,
        spec: None,
    })
}

fn detect(scorer: &Scorer, spec: &ScenarioSpec, d: &DetectionConfig, seed: u64) -> puoc::Result<Vec<ReliabilityVerdict>> {
    let n = d.sample_size;
    let pos = spec.draw_positive(n, derive_seed(seed, &[10]))?;
    let unl = spec.draw_unlabeled(n, false, derive_seed(seed, &[11]))?;
    let unl_test = spec.draw_unlabeled(n, true, derive_seed(seed, &[14]))?;
    let crit_high = match d.p_crit {
        Some(p) => p,
        None => calibrate_p_crit(scorer, &pos, derive_seed(seed, &[12]))?,
    };
    let crit_shift = match d.p_crit {
        Some(p) => p,
        None => calibrate_p_crit(scorer, &unl, derive_seed(seed, &[13]))?,
    };
    Ok(vec![
        detect_high_alpha(scorer, &pos, &unl, crit_high)?,
        detect_negative_shift(scorer, &unl, &unl_test, crit_shift)?,
    ])
}

fn run_task(cfg: &ExperimentConfig, files: Option<&RunData>, base: Option<&ScenarioSpec>, cell: usize, repeat: usize) -> Vec<ResultRecord> {
    let seed = derive_seed(cfg.base_seed, &[cell as u64, repeat as u64]);
    let sweep_value = cfg.sweep.as_ref().map(|s| s.value(cell));
    let blank = |model: &str| ResultRecord {
        model: model.to_string(),
        cell,
        sweep_value,
        repeat,
        seed,
        auc: None,
        alpha_hat: None,
        wall_time_ms: 0,
        verdicts: None,
        error: None,
    };

    let generated;
    let data = match (files, base) {
        (Some(d), _) => d,
        (None, Some(base)) => {
            let mut spec = match &cfg.sweep {
                Some(s) => s.apply(base, cell),
                None => base.clone(),
            };
            spec.seed = seed;
            match generate(&spec) {
                Ok(d) => {
                    generated = d;
                    &generated
                }
                Err(e) => {
                    return cfg
                        .models
                        .iter()
                        .map(|m| ResultRecord {
                            error: Some(e.to_string()),
                            ..blank(&m.id)
                        })
                        .collect()
                }
            }
        }
        (None, None) => unreachable!("validated config has a data source"),
    };

    cfg.models
        .iter()
        .map(|m| {
            let start = Instant::now();
            let outcome = m.kind.train(data.train.view(), data.alpha_true, seed).and_then(|t| {
                let auc = roc_auc(&t.scorer.try_score_all(&data.test_pos)?, &t.scorer.try_score_all(&data.test_neg)?)?;
                let verdicts = match (&cfg.detection, &data.spec) {
                    (Some(d), Some(spec)) => Some(detect(&t.scorer, spec, d, seed)?),
                    _ => None,
                };
                Ok((auc, t.alpha_hat, verdicts))
            });
            let wall_time_ms = if cfg.record_wall_time {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            match outcome {
                Ok((auc, alpha_hat, verdicts)) => ResultRecord {
                    auc: Some(auc),
                    alpha_hat,
                    verdicts,
                    wall_time_ms,
                    ..blank(&m.id)
                },
                Err(e) => ResultRecord {
                    error: Some(e.to_string()),
                    wall_time_ms,
                    ..blank(&m.id)
                },
            }
        })
        .collect()
}

/// Runs every model on every (cell, repeat). Seeds depend only on
/// `(base_seed, cell, repeat)`; records come back sorted by (model, cell, repeat).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let files = match &cfg.scenario {
        ScenarioSource::Csv { train, test } => Some(load_files(train, test)?),
        _ => None,
    };
    let base = cfg.base_spec()?;
    let tasks: Vec<(usize, usize)> = (0..cfg.cells())
        .flat_map(|c| (0..cfg.repeats).map(move |r| (c, r)))
        .collect();
    let mut records: Vec<ResultRecord> = tasks
        .par_iter()
        .flat_map_iter(|&(c, r)| run_task(cfg, files.as_ref(), base.as_ref(), c, r))
        .collect();
    sort_records(&mut records);
    Ok(records)
}

pub fn sort_records(records: &mut [ResultRecord]) {
    records.sort_by(|a, b| (&a.model, a.cell, a.repeat).cmp(&(&b.model, b.cell, b.repeat)));
}

/// Mean AUC of the successful runs of `model` in `cell`.
pub fn mean_auc(records: &[ResultRecord], model: &str, cell: usize) -> Option<f64> {
    let aucs: Vec<f64> = records
        .iter()
        .filter(|r| r.model == model && r.cell == cell)
        .filter_map(|r| r.auc)
        .collect();
    (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64)
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> BenchError {
    BenchError::Io(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    Ok(BufWriter::new(std::fs::File::create(path).map_err(|e| io_err(path, e))?))
}

/// One JSON object per line.
pub fn write_records(path: impl AsRef<Path>, records: &[ResultRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for r in records {
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(w, "{line}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ResultRecord>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResultRecord = serde_json::from_str(&line).map_err(|e| BenchError::Format {
            path: format!("{}:{}", path.display(), i + 1),
            reason: e.to_string(),
        })?;
        if let Some(a) = rec.auc {
            if !(0.0..=1.0).contains(&a) {
                return Err(BenchError::Format {
                    path: format!("{}:{}", path.display(), i + 1),
                    reason: format!("auc {a} outside [0, 1]"),
                });
            }
        }
        out.push(rec);
    }
    Ok(out)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Flat projection for plotting: one row per record, verdicts spread into columns.
pub fn write_csv(path: impl AsRef<Path>, records: &[ResultRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(create(path)?);
    let header = [
        "model",
        "cell",
        "sweep_value",
        "repeat",
        "seed",
        "auc",
        "alpha_hat",
        "wall_time_ms",
        "high_alpha_p",
        "high_alpha_unreliable",
        "shift_p",
        "shift_unreliable",
        "error",
    ];
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in records {
        let v = |i: usize| r.verdicts.as_ref().and_then(|v| v.get(i));
        let row = [
            r.model.clone(),
            r.cell.to_string(),
            opt(r.sweep_value),
            r.repeat.to_string(),
            r.seed.to_string(),
            opt(r.auc),
            opt(r.alpha_hat),
            r.wall_time_ms.to_string(),
            opt(v(0).map(|v| v.p_value)),
            opt(v(0).map(|v| v.unreliable)),
            opt(v(1).map(|v| v.p_value)),
            opt(v(1).map(|v| v.unreliable)),
            r.error.clone().unwrap_or_default(),
        ];
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}
