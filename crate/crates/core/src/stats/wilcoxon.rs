use super::ranks::midranks;
use super::{normal_p, tail_p, Alternative, PValueMethod, TestMethod, TestReport};
use crate::error::{invalid, PuError, Result};

/// Largest number of non-zero differences for which `Auto` enumerates sign patterns.
pub const WILCOXON_EXACT_CAP: usize = 12;
const EXACT_HARD_CAP: usize = 50;

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alternative: Alternative) -> Result<TestReport> {
    wilcoxon_signed_rank_with(x, y, alternative, PValueMethod::Auto)
}

/// Paired signed-rank test on `x - y`. Zero differences are dropped before
/// ranking; the statistic is the positive-rank sum `W+`.
pub fn wilcoxon_signed_rank_with(
    x: &[f64],
    y: &[f64],
    alternative: Alternative,
    method: PValueMethod,
) -> Result<TestReport> {
    if x.len() != y.len() {
        return Err(invalid("y", format!("paired samples differ in length: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(PuError::InsufficientData("signed-rank test needs at least two pairs".into()));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if diffs.iter().any(|d| d.is_nan()) {
        return Err(PuError::NonFinite("paired samples"));
    }
    let nonzero: Vec<f64> = diffs.into_iter().filter(|&d| d != 0.0).collect();
    let n = nonzero.len();
    if n < 2 {
        return Err(PuError::DegenerateTest(format!(
            "{n} non-zero paired difference(s) after dropping zeros"
        )));
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = midranks(&abs);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let exact = match method {
        PValueMethod::Auto => n <= WILCOXON_EXACT_CAP,
        PValueMethod::Exact => {
            if n > EXACT_HARD_CAP {
                return Err(invalid("method", format!("exact enumeration limited to {EXACT_HARD_CAP} pairs")));
            }
            true
        }
        PValueMethod::Asymptotic => false,
    };

    let p_value = if exact {
        // Midranks are multiples of 1/2, so doubled ranks are integers.
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let max: usize = doubled.iter().sum();
        let mut counts = vec![0.0f64; max + 1];
        counts[0] = 1.0;
        let mut reach = 0;
        for &r in &doubled {
            for s in (0..=reach).rev() {
                let c = counts[s];
                if c != 0.0 {
                    counts[s + r] += c;
                }
            }
            reach += r;
        }
        let total = 2f64.powi(n as i32);
        let w2 = (2.0 * w_plus).round() as usize;
        let le: f64 = counts[..=w2].iter().sum();
        let ge: f64 = counts[w2..].iter().sum();
        tail_p(alternative, le / total, ge / total)
    } else {
        let f = n as f64;
        let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
        let var = f * (f + 1.0) * (2.0 * f + 1.0) / 24.0 - tie_term / 48.0;
        normal_p(alternative, w_plus, f * (f + 1.0) / 4.0, var.max(0.0).sqrt())
    };

    Ok(TestReport {
        statistic: w_plus,
        p_value,
        method: TestMethod::WilcoxonSignedRank,
        alternative,
        n1: n,
        n2: n,
        exact,
    })
}
