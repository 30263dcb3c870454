use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores `>= threshold` are called positive at this point.
    pub threshold: f64,
}

/// Step path from (0, 0) to (1, 1), one point per distinct score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
            .sum()
    }
}

/// ROC curve and its area.
///
/// Scores are swept from high to low; tied scores enter together, which
/// makes the trapezoid area equal to the Mann-Whitney statistic with ties
/// counted as one half. The first point carries threshold `max + 1`.
pub fn roc_auc(labels: &[bool], scores: &[f64]) -> Result<(RocCurve, f64)> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: scores.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let (p, n) = (n_pos as f64, n_neg as f64);
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: scores[order[0]] + 1.0,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area in units of one positive-negative pair
    let mut doubled_pairs: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_pairs += (fp - fp0) as u128 * (tp + tp0) as u128;
        points.push(RocPoint {
            fpr: fp as f64 / n,
            tpr: tp as f64 / p,
            threshold: s,
        });
    }
    let auc = doubled_pairs as f64 / (2.0 * p * n);
    Ok((RocCurve { points }, auc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fixture() {
        // pairwise: 3 of 4 (pos, neg) pairs ordered correctly
        let (curve, auc) = roc_auc(&[false, false, true, true], &[0.1, 0.4, 0.35, 0.8]).unwrap();
        assert_eq!(auc, 0.75);
        assert_eq!(curve.points.first().map(|p| (p.fpr, p.tpr)), Some((0.0, 0.0)));
        assert_eq!(curve.points.last().map(|p| (p.fpr, p.tpr)), Some((1.0, 1.0)));
    }

    #[test]
    fn separating_and_tied() {
        assert_eq!(roc_auc(&[false, true, true], &[0.1, 0.7, 0.9]).unwrap().1, 1.0);
        let (curve, auc) = roc_auc(&[false, true, false, true], &[0.3; 4]).unwrap();
        assert_eq!(auc, 0.5);
        assert_eq!(curve.points.len(), 2);
    }

    #[test]
    fn single_class() {
        assert!(matches!(roc_auc(&[true, true], &[0.1, 0.2]), Err(Error::SingleClass)));
    }
}
