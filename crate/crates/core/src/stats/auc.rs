use super::mann_whitney::u_statistic;
use crate::error::{PuError, Result};

/// ROC AUC: `P(pos > neg) + P(pos = neg) / 2`, via midranks.
pub fn roc_auc(scores_pos: &[f64], scores_neg: &[f64]) -> Result<f64> {
    if scores_pos.is_empty() {
        return Err(PuError::Empty("positive scores"));
    }
    if scores_neg.is_empty() {
        return Err(PuError::Empty("negative scores"));
    }
    if scores_pos.iter().chain(scores_neg).any(|s| s.is_nan()) {
        return Err(PuError::NonFinite("scores"));
    }
    let (u, _) = u_statistic(scores_pos, scores_neg);
    let pairs = scores_pos.len() as f64 * scores_neg.len() as f64;
    // The lower half is evaluated as the complement of the upper half, so that
    // swapping the classes gives exactly 1 - auc.
    if 2.0 * u >= pairs {
        Ok(u / pairs)
    } else {
        Ok(1.0 - (pairs - u) / pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(roc_auc(&[0.9, 0.8], &[0.1, 0.2]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.3, 0.1, 0.2], &[0.2, 0.3, 0.1]).unwrap(), 0.5);
        assert_eq!(roc_auc(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 0.5);
    }

    #[test]
    fn complement_and_errors() {
        let p = [0.3, 0.7, 0.7, 0.1];
        let n = [0.2, 0.7, 0.05];
        let a = roc_auc(&p, &n).unwrap();
        assert_eq!(roc_auc(&n, &p).unwrap(), 1.0 - a);
        assert!(roc_auc(&[], &n).is_err());
        assert!(roc_auc(&p, &[]).is_err());
        assert!(roc_auc(&[f64::NAN], &n).is_err());
    }
}
