//! Feature ranking and selection.
//!
//! Refined selection scores every feature and keeps exactly `k` of them.
//! Prototype selection keeps every feature with a non-zero L1 coefficient,
//! so its cardinality varies from fold to fold, and falls back to the top
//! `fallback_k` L2 coefficients when the L1 fit is empty.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{self, LinearModel, PenaltyConfig, PenaltyKind};
use crate::preprocess::DesignMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    L1,
    #[serde(rename = "elasticnet")]
    ElasticNet,
    MutualInfo,
    PrototypeL1Nonzero,
}

impl SelectionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMethod::L1 => "l1",
            SelectionMethod::ElasticNet => "elasticnet",
            SelectionMethod::MutualInfo => "mutual_info",
            SelectionMethod::PrototypeL1Nonzero => "prototype_l1_nonzero",
        }
    }
}

impl std::str::FromStr for SelectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "l1" => SelectionMethod::L1,
            "elasticnet" | "elastic_net" => SelectionMethod::ElasticNet,
            "mutual_info" | "mi" => SelectionMethod::MutualInfo,
            "prototype_l1_nonzero" | "prototype" => SelectionMethod::PrototypeL1Nonzero,
            other => return Err(Error::InvalidConfig(format!("unknown selection method `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub method: SelectionMethod,
    pub k: usize,
    pub mi_bins: usize,
    pub fallback_k: usize,
    /// Strength (and mixing, for elastic net) of the scoring fits. The kind
    /// is overridden by the method.
    pub inner_penalty: PenaltyConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            method: SelectionMethod::L1,
            k: 100,
            mi_bins: 10,
            fallback_k: 100,
            inner_penalty: PenaltyConfig::default(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.fallback_k == 0 {
            return Err(Error::InvalidConfig("k and fallback_k must be positive".into()));
        }
        if self.mi_bins < 2 {
            return Err(Error::InvalidConfig("mi_bins must be at least 2".into()));
        }
        self.inner_penalty.validate()
    }

    /// Penalty of the L1 (or elastic-net) fit this method ranks by, if any.
    pub fn scoring_penalty(&self) -> Option<PenaltyConfig> {
        match self.method {
            SelectionMethod::L1 | SelectionMethod::PrototypeL1Nonzero => {
                Some(self.inner_penalty.with_kind(PenaltyKind::L1))
            }
            SelectionMethod::ElasticNet => Some(self.inner_penalty.with_kind(PenaltyKind::ElasticNet)),
            SelectionMethod::MutualInfo => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: String,
    /// Sorted by descending score, ties by ascending index.
    pub selected_indices: Vec<usize>,
    pub selected_names: Vec<String>,
    /// One score per input feature.
    pub scores: Vec<f64>,
    pub fold_id: Option<usize>,
    /// Prototype only: the L1 fit was empty and L2 coefficients were used.
    #[serde(default)]
    pub fallback_used: bool,
}

impl SelectionResult {
    pub fn len(&self) -> usize {
        self.selected_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected_indices.is_empty()
    }
}

fn abs_weights(model: &LinearModel) -> Vec<f64> {
    model.weights.iter().map(|w| w.abs()).collect()
}

/// `|w_j|` of an L1 logistic fit.
pub fn score_l1(x: &DesignMatrix, penalty: &PenaltyConfig) -> Result<Vec<f64>> {
    Ok(abs_weights(&linear::fit(x, &penalty.with_kind(PenaltyKind::L1))?))
}

/// `|w_j|` of an elastic-net logistic fit with `penalty.mixing`.
pub fn score_elasticnet(x: &DesignMatrix, penalty: &PenaltyConfig) -> Result<Vec<f64>> {
    Ok(abs_weights(&linear::fit(x, &penalty.with_kind(PenaltyKind::ElasticNet))?))
}

/// Bin index per value under equal-frequency binning.
///
/// A feature with at most `bins` distinct values gets one bin per value.
/// Otherwise each tie group sits at its mid-rank quantile
/// `t = (mid_rank + 0.5) / n` and lands in bin `floor(t * bins)`, with exact
/// boundaries resolved toward the middle of the range so that negating the
/// feature only mirrors the bin order.
pub fn equal_frequency_bins(values: ArrayView1<f64>, bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || values[order[i]] != values[order[start]] {
            groups.push((start, i));
            start = i;
        }
    }

    let mut out = vec![0; n];
    for (g, &(lo, hi)) in groups.iter().enumerate() {
        let bin = if groups.len() <= bins {
            g
        } else {
            let mid = (lo + hi - 1) as f64 / 2.0;
            let t = (mid + 0.5) / n as f64;
            let scaled = t * bins as f64;
            if t <= 0.5 {
                (scaled.ceil() as usize).saturating_sub(1)
            } else {
                (scaled.floor() as usize).min(bins - 1)
            }
        };
        for &i in &order[lo..hi] {
            out[i] = bin;
        }
    }
    out
}

/// Plug-in mutual information (nats) between a binned feature and the label.
pub fn mutual_information(values: ArrayView1<f64>, labels: &[bool], bins: usize) -> f64 {
    let n = labels.len();
    if n == 0 {
        return 0.0;
    }
    let assigned = equal_frequency_bins(values, bins);
    let n_bins = assigned.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![[0usize; 2]; n_bins];
    for (&b, &y) in assigned.iter().zip(labels) {
        joint[b][y as usize] += 1;
    }
    let n_y = [
        labels.iter().filter(|&&y| !y).count(),
        labels.iter().filter(|&&y| y).count(),
    ];
    let nf = n as f64;
    let mut mi = 0.0;
    for row in &joint {
        let n_b = (row[0] + row[1]) as f64;
        for y in 0..2 {
            let c = row[y] as f64;
            if c > 0.0 {
                mi += c / nf * (c * nf / (n_b * n_y[y] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

pub fn score_mutual_info(x: &DesignMatrix, bins: usize) -> Vec<f64> {
    x.values
        .columns()
        .into_iter()
        .map(|c| mutual_information(c, &x.labels, bins))
        .collect()
}

fn ranked(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

/// Exactly `k` highest-scoring features; ties go to the lower index.
pub fn select_top_k(scores: &[f64], names: &[String], k: usize) -> Result<SelectionResult> {
    if k > scores.len() {
        return Err(Error::KTooLarge {
            k,
            available: scores.len(),
        });
    }
    if names.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: names.len(),
            right: scores.len(),
        });
    }
    let selected: Vec<usize> = ranked(scores).into_iter().take(k).collect();
    Ok(SelectionResult {
        method: "top_k".into(),
        selected_names: selected.iter().map(|&i| names[i].clone()).collect(),
        selected_indices: selected,
        scores: scores.to_vec(),
        fold_id: None,
        fallback_used: false,
    })
}

/// Non-zero L1 coefficients, or the top `fallback_k` L2 coefficients when
/// the L1 fit is empty.
pub fn select_prototype(x: &DesignMatrix, config: &SelectionConfig) -> Result<SelectionResult> {
    select_with_fits(x, &SelectionConfig {
        method: SelectionMethod::PrototypeL1Nonzero,
        ..config.clone()
    }, &[])
}

/// Runs the configured selection.
pub fn select(x: &DesignMatrix, config: &SelectionConfig) -> Result<SelectionResult> {
    select_with_fits(x, config, &[])
}

/// Like [`select`], but reuses any model in `fitted` whose penalty equals
/// the one a scoring fit would use. Fits are deterministic, so the result is
/// identical to refitting.
pub fn select_with_fits(
    x: &DesignMatrix,
    config: &SelectionConfig,
    fitted: &[&LinearModel],
) -> Result<SelectionResult> {
    config.validate()?;
    let fit = |penalty: PenaltyConfig| -> Result<LinearModel> {
        match fitted.iter().find(|m| m.penalty == penalty) {
            Some(m) => Ok((*m).clone()),
            None => linear::fit(x, &penalty),
        }
    };
    let mut result = match config.method {
        SelectionMethod::MutualInfo => {
            select_top_k(&score_mutual_info(x, config.mi_bins), &x.feature_names, config.k)?
        }
        SelectionMethod::L1 | SelectionMethod::ElasticNet => {
            let model = fit(config.scoring_penalty().unwrap())?;
            select_top_k(&abs_weights(&model), &x.feature_names, config.k)?
        }
        SelectionMethod::PrototypeL1Nonzero => {
            let scores = abs_weights(&fit(config.scoring_penalty().unwrap())?);
            let nonzero = scores.iter().filter(|&&s| s > 0.0).count();
            if nonzero > 0 {
                select_top_k(&scores, &x.feature_names, nonzero)?
            } else {
                let l2 = fit(config.inner_penalty.with_kind(PenaltyKind::L2))?;
                let k = config.fallback_k.min(x.n_features());
                let mut r = select_top_k(&abs_weights(&l2), &x.feature_names, k)?;
                r.fallback_used = true;
                r
            }
        }
    };
    result.method = config.method.as_str().to_owned();
    Ok(result)
}
