//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string; the plain Rust functions behind them are usable natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use puoc::data::{derive_seed, gen_two_gaussian_scenario, DataPoint, ScenarioSpec};
use puoc::math::{ClassPrior, Kernel};
use puoc::models::{train_oc_svm_with, train_pu_svm_sgd, OcSvmOptions, Scorer, TrainConfig};
use puoc::reliability::{calibrate_p_crit, detect_high_alpha, detect_negative_shift, ReliabilityVerdict, DEFAULT_P_CRIT};
use puoc::stats::{mann_whitney_u, roc_auc, wilcoxon_signed_rank, Alternative};

pub const GRID: usize = 48;
pub const X_RANGE: (f64, f64) = (-8.0, 8.0);
pub const Y_RANGE: (f64, f64) = (-6.0, 6.0);
const SHOWN_POINTS: usize = 150;

fn small_scenario(alpha: f64, shift: bool, seed: u64) -> ScenarioSpec {
    let base = if shift { ScenarioSpec::fig1_shift(seed) } else { ScenarioSpec::fig1(seed) };
    ScenarioSpec {
        n_pos_labeled: 300,
        n_unlabeled: 600,
        n_test_per_class: 300,
        alpha,
        ..base
    }
}

fn train_pair(spec: &ScenarioSpec) -> puoc::Result<(Scorer, Scorer, puoc::data::Scenario)> {
    let sc = gen_two_gaussian_scenario(spec)?;
    let cfg = TrainConfig::default().with_seed(spec.seed);
    let oc_opts = OcSvmOptions {
        kernel: Kernel::rbf(0.1)?,
        standardize: false,
    };
    let oc = train_oc_svm_with(sc.train.positive(), 0.5, &cfg, &oc_opts)?;
    let pu = train_pu_svm_sgd(sc.train.view(), ClassPrior::new(spec.alpha)?, Kernel::Linear, &cfg)?;
    Ok((oc, pu, sc))
}

#[derive(Debug, Serialize)]
pub struct ScoreFields {
    pub oc_auc: f64,
    pub pu_auc: f64,
    pub grid: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Row-major scores, first row at the bottom (`y_range.0`).
    pub oc: Vec<f64>,
    pub pu: Vec<f64>,
    pub positives: Vec<[f64; 2]>,
    pub test_negatives: Vec<[f64; 2]>,
}

fn pairs(points: &[DataPoint]) -> Vec<[f64; 2]> {
    points.iter().take(SHOWN_POINTS).map(|p| [p[0], p[1]]).collect()
}

fn field(s: &Scorer) -> Vec<f64> {
    let step = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * (i as f64 + 0.5) / GRID as f64;
    (0..GRID)
        .flat_map(|r| (0..GRID).map(move |c| [step(X_RANGE, c), step(Y_RANGE, r)]))
        .map(|x| s.score(&x))
        .collect()
}

/// OC-SVM and PU-SVM trained on one two-Gaussian scenario: test AUCs and
/// both score fields over a grid.
pub fn score_fields(alpha: f64, shift: bool, seed: u64) -> puoc::Result<ScoreFields> {
    let spec = small_scenario(alpha, shift, seed);
    let (oc, pu, sc) = train_pair(&spec)?;
    let auc = |s: &Scorer| roc_auc(&s.score_all(&sc.test_pos), &s.score_all(&sc.test_neg));
    Ok(ScoreFields {
        oc_auc: auc(&oc)?,
        pu_auc: auc(&pu)?,
        grid: GRID,
        x_range: X_RANGE,
        y_range: Y_RANGE,
        oc: field(&oc),
        pu: field(&pu),
        positives: pairs(sc.train.positive()),
        test_negatives: pairs(&sc.test_neg),
    })
}

#[derive(Debug, Serialize)]
pub struct ReliabilityReport {
    pub high_alpha: ReliabilityVerdict,
    pub shift: ReliabilityVerdict,
}

/// Both reliability checks with a trained PU-SVM: high-alpha at the default
/// threshold, shift with a calibrated threshold.
pub fn reliability(alpha: f64, shift: bool, seed: u64, sample_size: usize) -> puoc::Result<ReliabilityReport> {
    let spec = small_scenario(alpha, shift, seed);
    let (_, pu, _) = train_pair(&spec)?;
    let pos = spec.draw_positive(sample_size, derive_seed(seed, &[10]))?;
    let unl = spec.draw_unlabeled(sample_size, false, derive_seed(seed, &[11]))?;
    let unl_test = spec.draw_unlabeled(sample_size, true, derive_seed(seed, &[14]))?;
    let p_crit = calibrate_p_crit(&pu, &unl, derive_seed(seed, &[13]))?;
    Ok(ReliabilityReport {
        high_alpha: detect_high_alpha(&pu, &pos, &unl, DEFAULT_P_CRIT)?,
        shift: detect_negative_shift(&pu, &unl, &unl_test, p_crit)?,
    })
}

#[derive(Debug, Serialize)]
pub struct RankComparison {
    pub auc: f64,
    pub mann_whitney_p: f64,
    /// Only for samples of equal length with at least two non-zero differences.
    pub wilcoxon_p: Option<f64>,
}

pub fn parse_numbers(text: &str) -> puoc::Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| puoc::PuError::InvalidParameter {
                    name: "sample",
                    reason: format!("`{t}` is not a number"),
                })
        })
        .collect()
}

/// Rank statistics for two typed-in samples.
pub fn rank_compare(a: &str, b: &str) -> puoc::Result<RankComparison> {
    let a = parse_numbers(a)?;
    let b = parse_numbers(b)?;
    let wilcoxon_p = if a.len() == b.len() {
        wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).ok().map(|r| r.p_value)
    } else {
        None
    };
    Ok(RankComparison {
        auc: roc_auc(&a, &b)?,
        mann_whitney_p: mann_whitney_u(&a, &b, Alternative::TwoSided)?.p_value,
        wilcoxon_p,
    })
}

fn to_js<T: Serialize>(r: puoc::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = scoreFields)]
pub fn score_fields_js(alpha: f64, shift: bool, seed: u32) -> Result<String, JsError> {
    to_js(score_fields(alpha, shift, seed as u64))
}

#[wasm_bindgen(js_name = reliability)]
pub fn reliability_js(alpha: f64, shift: bool, seed: u32, sample_size: u32) -> Result<String, JsError> {
    to_js(reliability(alpha, shift, seed as u64, sample_size as usize))
}

#[wasm_bindgen(js_name = rankCompare)]
pub fn rank_compare_js(a: &str, b: &str) -> Result<String, JsError> {
    to_js(rank_compare(a, b))
}
