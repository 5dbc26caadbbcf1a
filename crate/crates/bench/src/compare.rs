use std::collections::BTreeMap;

use puoc::stats::{wilcoxon_signed_rank, Alternative, TestReport};
use puoc::PuError;

use crate::error::{BenchError, Result};
use crate::runner::ResultRecord;

pub const SIGNIFICANCE: f64 = 0.05;

/// Paired comparison of two models over matching (cell, repeat) runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub model_a: String,
    pub model_b: String,
    pub pairs: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `None` when every pair ties, where the test is undefined.
    pub report: Option<TestReport>,
    /// Model with the higher AUC when the difference is significant.
    pub favored: Option<String>,
}

impl Comparison {
    pub fn significant(&self) -> bool {
        self.favored.is_some()
    }

    pub fn p_value(&self) -> Option<f64> {
        self.report.map(|r| r.p_value)
    }
}

impl std::fmt::Display for Comparison {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "pairs: {}", self.pairs)?;
        writeln!(f, "mean auc {}: {:.4}", self.model_a, self.mean_a)?;
        writeln!(f, "mean auc {}: {:.4}", self.model_b, self.mean_b)?;
        match &self.report {
            Some(r) => writeln!(f, "p-value: {:.6}", r.p_value)?,
            None => writeln!(f, "p-value: undefined (all pairs tie)")?,
        }
        match &self.favored {
            Some(m) => write!(f, "favored: {m}"),
            None => write!(f, "favored: none (no significant difference)"),
        }
    }
}

fn aucs_by_run(records: &[ResultRecord], model: &str) -> Result<BTreeMap<(usize, usize), f64>> {
    let mut out = BTreeMap::new();
    for r in records.iter().filter(|r| r.model == model) {
        let auc = r.auc.ok_or_else(|| {
            BenchError::Pairing(format!("{model} failed in cell {} repeat {}", r.cell, r.repeat))
        })?;
        if out.insert((r.cell, r.repeat), auc).is_some() {
            return Err(BenchError::Pairing(format!(
                "{model} has two records for cell {} repeat {}",
                r.cell, r.repeat
            )));
        }
    }
    if out.is_empty() {
        return Err(BenchError::Pairing(format!("no records for model `{model}`")));
    }
    Ok(out)
}

/// Two-sided Wilcoxon signed-rank test on AUC pairs matched by (cell, repeat).
pub fn compare_models(records: &[ResultRecord], model_a: &str, model_b: &str) -> Result<Comparison> {
    let a = aucs_by_run(records, model_a)?;
    let b = aucs_by_run(records, model_b)?;
    if a.len() != b.len() || a.keys().zip(b.keys()).any(|(x, y)| x != y) {
        return Err(BenchError::Pairing(format!(
            "{model_a} and {model_b} were not run on the same cells and repeats"
        )));
    }
    let xa: Vec<f64> = a.values().copied().collect();
    let xb: Vec<f64> = b.values().copied().collect();
    let n = xa.len() as f64;
    let mean_a = xa.iter().sum::<f64>() / n;
    let mean_b = xb.iter().sum::<f64>() / n;
    let report = match wilcoxon_signed_rank(&xa, &xb, Alternative::TwoSided) {
        Ok(r) => Some(r),
        Err(PuError::DegenerateTest(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let favored = report.filter(|r| r.p_value < SIGNIFICANCE).map(|_| {
        let diff: f64 = xb.iter().zip(&xa).map(|(b, a)| b - a).sum();
        if diff > 0.0 { model_b } else { model_a }.to_string()
    });
    Ok(Comparison {
        model_a: model_a.to_string(),
        model_b: model_b.to_string(),
        pairs: xa.len(),
        mean_a,
        mean_b,
        report,
        favored,
    })
}
