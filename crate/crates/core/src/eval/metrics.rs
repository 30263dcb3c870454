use serde::{Deserialize, Serialize};

use super::roc::roc_auc;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Threshold metrics plus AUC for one model on one evaluation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub confusion: Confusion,
    pub threshold: f64,
}

/// Predicts positive iff `prob >= threshold`.
///
/// Zero-division conventions: precision is 0 when nothing is predicted
/// positive, recall is 0 when there are no positives, F1 is 0 when both are
/// 0. AUC is 0.5 when the labels hold a single class.
pub fn confusion_metrics(labels: &[bool], probs: &[f64], threshold: f64) -> Result<Metrics> {
    if labels.len() != probs.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: probs.len(),
        });
    }
    let mut c = Confusion::default();
    for (&y, &p) in labels.iter().zip(probs) {
        match (y, p >= threshold) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let auc = match roc_auc(labels, probs) {
        Ok((_, auc)) => auc,
        Err(Error::SingleClass) => 0.5,
        Err(e) => return Err(e),
    };
    Ok(Metrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f1,
        auc,
        confusion: c,
        threshold,
    })
}

/// Fold-averaged metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
}

impl MeanMetrics {
    pub fn of(metrics: &[&Metrics]) -> MeanMetrics {
        let n = metrics.len() as f64;
        let mean = |f: fn(&Metrics) -> f64| metrics.iter().map(|m| f(m)).sum::<f64>() / n;
        MeanMetrics {
            accuracy: mean(|m| m.accuracy),
            precision: mean(|m| m.precision),
            recall: mean(|m| m.recall),
            f1: mean(|m| m.f1),
            auc: mean(|m| m.auc),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counted_fixture() {
        // tp=2 fp=1 fn=1 tn=6
        let labels = [true, true, true, false, false, false, false, false, false, false];
        let probs = [0.9, 0.8, 0.2, 0.7, 0.1, 0.1, 0.3, 0.4, 0.0, 0.2];
        let m = confusion_metrics(&labels, &probs, 0.5).unwrap();
        assert_eq!(m.confusion, Confusion { tp: 2, fp: 1, tn: 6, fn_: 1 });
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.accuracy, 0.8);
    }

    #[test]
    fn perfect_predictions() {
        let m = confusion_metrics(&[true, false, true], &[0.9, 0.1, 0.6], 0.5).unwrap();
        for v in [m.accuracy, m.precision, m.recall, m.f1, m.auc] {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn all_negative_predictions() {
        let m = confusion_metrics(&[true, false, true, false], &[0.1, 0.2, 0.3, 0.4], 0.5).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        assert_eq!(m.accuracy, 0.5);
    }

    #[test]
    fn threshold_is_inclusive() {
        let m = confusion_metrics(&[true, false], &[0.5, 0.49], 0.5).unwrap();
        assert_eq!(m.confusion.tp, 1);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            confusion_metrics(&[true], &[0.1, 0.2], 0.5),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
