use super::ranks::midranks;
use super::{normal_p, tail_p, Alternative, PValueMethod, TestMethod, TestReport};
use crate::error::{invalid, PuError, Result};

/// Largest combined sample size for which `Auto` enumerates the null distribution.
pub const MWU_EXACT_CAP: usize = 16;
const EXACT_HARD_CAP: usize = 50;

/// `U` for the first sample (wins plus half-ties against the second) and the
/// tie-group sizes of the pooled sample.
pub fn u_statistic(a: &[f64], b: &[f64]) -> (f64, Vec<usize>) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let n1 = a.len() as f64;
    let rank_sum: f64 = ranks[..a.len()].iter().sum();
    (rank_sum - n1 * (n1 + 1.0) / 2.0, ties)
}

/// Null distribution of `U` without ties: `counts[u]` = number of rank
/// assignments giving `U = u`.
fn exact_u_counts(n1: usize, n2: usize) -> Vec<f64> {
    // table[i][j] holds the distribution for sizes (i, j); row-by-row DP.
    let mut prev: Vec<Vec<f64>> = (0..=n2).map(|_| vec![1.0]).collect();
    for i in 1..=n1 {
        let mut cur: Vec<Vec<f64>> = Vec::with_capacity(n2 + 1);
        cur.push(vec![1.0]);
        for j in 1..=n2 {
            // The largest rank belongs either to sample a (adds j wins) or to b.
            let mut d = vec![0.0; i * j + 1];
            for (u, &c) in prev[j].iter().enumerate() {
                d[u + j] += c;
            }
            for (u, &c) in cur[j - 1].iter().enumerate() {
                d[u] += c;
            }
            cur.push(d);
        }
        prev = cur;
    }
    prev.swap_remove(n2)
}

pub fn mann_whitney_u(a: &[f64], b: &[f64], alternative: Alternative) -> Result<TestReport> {
    mann_whitney_u_with(a, b, alternative, PValueMethod::Auto)
}

/// Mann-Whitney U test with an explicit p-value method.
pub fn mann_whitney_u_with(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    method: PValueMethod,
) -> Result<TestReport> {
    if a.is_empty() || b.is_empty() {
        return Err(PuError::Empty("Mann-Whitney sample"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(PuError::NonFinite("Mann-Whitney sample"));
    }
    let (n1, n2) = (a.len(), b.len());
    let (u, ties) = u_statistic(a, b);
    let n = n1 + n2;
    let exact = match method {
        PValueMethod::Auto => n <= MWU_EXACT_CAP && ties.is_empty(),
        PValueMethod::Exact => {
            if !ties.is_empty() {
                return Err(invalid("method", "exact Mann-Whitney p-values require tie-free samples"));
            }
            if n > EXACT_HARD_CAP {
                return Err(invalid("method", format!("exact enumeration limited to {EXACT_HARD_CAP} points")));
            }
            true
        }
        PValueMethod::Asymptotic => false,
    };

    let p_value = if exact {
        let counts = exact_u_counts(n1, n2);
        let total: f64 = counts.iter().sum();
        // u is an integer without ties
        let k = u.round() as usize;
        let le: f64 = counts[..=k].iter().sum();
        let ge: f64 = counts[k..].iter().sum();
        tail_p(alternative, le / total, ge / total)
    } else {
        let (f1, f2, fnn) = (n1 as f64, n2 as f64, n as f64);
        let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
        let var = f1 * f2 / 12.0 * ((fnn + 1.0) - tie_term / (fnn * (fnn - 1.0)));
        let var = if n > 1 { var } else { 0.0 };
        normal_p(alternative, u, f1 * f2 / 2.0, var.max(0.0).sqrt())
    };

    Ok(TestReport {
        statistic: u,
        p_value,
        method: TestMethod::MannWhitneyU,
        alternative,
        n1,
        n2,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_samples_exact() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.exact);
        assert!((r.p_value - 0.1).abs() < 1e-15);
        let less = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Less).unwrap();
        assert!((less.p_value - 0.05).abs() < 1e-15);
        let greater = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Greater).unwrap();
        assert_eq!(greater.p_value, 1.0);
    }

    #[test]
    fn identical_samples_give_p_one() {
        let a = [0.4, 1.3, 2.2, 0.9];
        let r = mann_whitney_u(&a, &a, Alternative::TwoSided).unwrap();
        assert!(!r.exact);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.statistic, 8.0);
    }

    #[test]
    fn all_tied_is_p_one() {
        let r = mann_whitney_u(&[1.0; 5], &[1.0; 7], Alternative::TwoSided).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn complementarity() {
        let a = [0.3, 2.0, 2.0, -1.0, 5.5];
        let b = [2.0, 0.1, 7.0];
        let (u_ab, _) = u_statistic(&a, &b);
        let (u_ba, _) = u_statistic(&b, &a);
        assert_eq!(u_ab + u_ba, 15.0);
    }

    #[test]
    fn exact_counts_sum_to_binomial() {
        let c = exact_u_counts(3, 3);
        assert_eq!(c.iter().sum::<f64>(), 20.0);
        assert_eq!(c, vec![1.0, 1.0, 2.0, 3.0, 3.0, 3.0, 3.0, 2.0, 1.0, 1.0]);
        let c = exact_u_counts(1, 4);
        assert_eq!(c, vec![1.0; 5]);
    }

    #[test]
    fn forced_exact_rejects_ties() {
        assert!(mann_whitney_u_with(&[1.0, 2.0], &[2.0, 3.0], Alternative::TwoSided, PValueMethod::Exact).is_err());
        assert!(mann_whitney_u(&[], &[1.0], Alternative::TwoSided).is_err());
    }
}
