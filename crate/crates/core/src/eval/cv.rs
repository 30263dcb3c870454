use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{stratified_folds, Fold};
use super::importance::{permutation_importance, FeatureImportance};
use super::metrics::{confusion_metrics, MeanMetrics, Metrics};
use super::roc::{roc_auc, RocCurve};
use crate::error::{Error, Result};
use crate::ingest::{derive_label, LabelRule, Table};
use crate::linear::{self, LinearModel, PenaltyConfig};
use crate::mlp::{self, MlpConfig, MlpModel};
use crate::preprocess::{fit_plan, DesignMatrix, PreprocessPlan};
use crate::select::{select_with_fits, SelectionConfig, SelectionMethod, SelectionResult};

pub const L1_LOGISTIC: &str = "l1_logistic";
pub const L2_LOGISTIC: &str = "l2_logistic";
pub const MLP_FULL: &str = "mlp_full";
pub const HYBRID_TOPK: &str = "hybrid_topk";
pub const HYBRID_PROTOTYPE: &str = "hybrid_prototype";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineMode {
    /// Non-zero-L1 selection feeding a small MLP.
    Prototype,
    /// Exact top-k selection feeding the (128, 64) MLP.
    Refined,
}

impl PipelineMode {
    pub fn hybrid_name(self) -> &'static str {
        match self {
            PipelineMode::Prototype => HYBRID_PROTOTYPE,
            PipelineMode::Refined => HYBRID_TOPK,
        }
    }

    pub fn model_names(self) -> [&'static str; 4] {
        [L1_LOGISTIC, L2_LOGISTIC, MLP_FULL, self.hybrid_name()]
    }
}

/// Everything the model loop needs. Data location and sampling live in the
/// command-line configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub mode: PipelineMode,
    /// Identifier column dropped before preprocessing.
    pub key_column: Option<String>,
    pub missingness_threshold: f64,
    pub l1: PenaltyConfig,
    pub l2: PenaltyConfig,
    pub mlp_full: MlpConfig,
    pub mlp_hybrid: MlpConfig,
    pub selection: SelectionConfig,
    pub n_folds: usize,
    /// Seed of the fold assignment.
    pub seed: u64,
    pub threshold: f64,
    pub importance_repeats: usize,
    pub importance_seed: u64,
    pub parallel_folds: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::refined()
    }
}

impl PipelineConfig {
    pub fn refined() -> Self {
        PipelineConfig {
            mode: PipelineMode::Refined,
            key_column: Some("SEQN".into()),
            missingness_threshold: 0.5,
            l1: PenaltyConfig::l1(0.02),
            l2: PenaltyConfig::l2(0.02),
            mlp_full: MlpConfig::baseline(),
            mlp_hybrid: MlpConfig::hybrid(),
            selection: SelectionConfig::default(),
            n_folds: 3,
            seed: 42,
            threshold: 0.5,
            importance_repeats: 5,
            importance_seed: 42,
            parallel_folds: false,
        }
    }

    pub fn prototype() -> Self {
        PipelineConfig {
            mode: PipelineMode::Prototype,
            mlp_hybrid: MlpConfig::baseline(),
            selection: SelectionConfig {
                method: SelectionMethod::PrototypeL1Nonzero,
                ..SelectionConfig::default()
            },
            ..Self::refined()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_folds < 2 {
            return Err(Error::InvalidConfig(format!("n_folds = {}, need at least 2", self.n_folds)));
        }
        if !(0.0..=1.0).contains(&self.missingness_threshold) {
            return Err(Error::InvalidConfig("missingness_threshold outside [0, 1]".into()));
        }
        let prototype_selector = self.selection.method == SelectionMethod::PrototypeL1Nonzero;
        if prototype_selector != (self.mode == PipelineMode::Prototype) {
            return Err(Error::InvalidConfig(format!(
                "selection method `{}` does not match the {:?} pipeline",
                self.selection.method.as_str(),
                self.mode
            )));
        }
        if self.importance_repeats == 0 {
            return Err(Error::InvalidConfig("importance_repeats must be positive".into()));
        }
        self.l1.validate()?;
        self.l2.validate()?;
        self.mlp_full.validate()?;
        self.mlp_hybrid.validate()?;
        self.selection.validate()
    }

    fn drop_key(&self, table: &Table) -> Table {
        match &self.key_column {
            Some(k) => table.without_columns(&[k.as_str()]),
            None => table.clone(),
        }
    }
}

fn with_seed(config: &MlpConfig, offset: u64) -> MlpConfig {
    MlpConfig {
        seed: config.seed.wrapping_add(offset),
        ..config.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold_id: usize,
    /// Row indices into the labeled feature table.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub per_model: BTreeMap<String, Metrics>,
    pub per_model_roc: BTreeMap<String, RocCurve>,
    /// Test-set probabilities aligned with `test_indices`.
    pub test_scores: BTreeMap<String, Vec<f64>>,
    pub selection: Option<SelectionResult>,
}

/// Fitted objects of one fold, kept for persistence and re-scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldArtifacts {
    pub plan: PreprocessPlan,
    pub l1: LinearModel,
    pub l2: LinearModel,
    pub mlp_full: MlpModel,
    pub hybrid: MlpModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JaccardPair {
    pub fold_a: usize,
    pub fold_b: usize,
    pub jaccard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStability {
    /// Number of selected features per fold.
    pub counts: Vec<usize>,
    pub pairwise_jaccard: Vec<JaccardPair>,
    pub mean_jaccard: f64,
}

impl SelectionStability {
    pub fn from_selections(selections: &[&SelectionResult]) -> Self {
        let sets: Vec<BTreeSet<&str>> = selections
            .iter()
            .map(|s| s.selected_names.iter().map(String::as_str).collect())
            .collect();
        let mut pairs = Vec::new();
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                let inter = sets[a].intersection(&sets[b]).count();
                let union = sets[a].union(&sets[b]).count();
                pairs.push(JaccardPair {
                    fold_a: selections[a].fold_id.unwrap_or(a),
                    fold_b: selections[b].fold_id.unwrap_or(b),
                    jaccard: if union == 0 { 1.0 } else { inter as f64 / union as f64 },
                });
            }
        }
        let mean_jaccard = if pairs.is_empty() {
            1.0
        } else {
            pairs.iter().map(|p| p.jaccard).sum::<f64>() / pairs.len() as f64
        };
        SelectionStability {
            counts: selections.iter().map(|s| s.len()).collect(),
            pairwise_jaccard: pairs,
            mean_jaccard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: PipelineMode,
    pub folds: Vec<FoldReport>,
    pub mean_metrics: BTreeMap<String, MeanMetrics>,
    pub selection_stability: SelectionStability,
    /// Echo of the configuration that produced the report.
    pub metadata: serde_json::Value,
}

impl RunReport {
    fn assemble(config: &PipelineConfig, folds: Vec<FoldReport>, metadata: serde_json::Value) -> Self {
        let mut mean_metrics = BTreeMap::new();
        for name in config.mode.model_names() {
            let per_fold: Vec<&Metrics> = folds.iter().map(|f| &f.per_model[name]).collect();
            mean_metrics.insert(name.to_owned(), MeanMetrics::of(&per_fold));
        }
        let selections: Vec<&SelectionResult> = folds.iter().filter_map(|f| f.selection.as_ref()).collect();
        RunReport {
            mode: config.mode,
            selection_stability: SelectionStability::from_selections(&selections),
            folds,
            mean_metrics,
            metadata,
        }
    }

    /// Out-of-fold scores of `model` pooled over folds, as (labels, scores).
    pub fn pooled_scores(&self, model: &str, labels: &[bool]) -> (Vec<bool>, Vec<f64>) {
        let mut y = Vec::new();
        let mut s = Vec::new();
        for f in &self.folds {
            if let Some(scores) = f.test_scores.get(model) {
                y.extend(f.test_indices.iter().map(|&i| labels[i]));
                s.extend_from_slice(scores);
            }
        }
        (y, s)
    }
}

/// Report together with the fitted per-fold objects.
#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub report: RunReport,
    pub artifacts: Vec<FoldArtifacts>,
}

fn evaluate(
    name: &str,
    probs: Vec<f64>,
    labels: &[bool],
    threshold: f64,
    report: &mut FoldReport,
) -> Result<()> {
    let metrics = confusion_metrics(labels, &probs, threshold)?;
    let (roc, _) = roc_auc(labels, &probs)?;
    report.per_model.insert(name.to_owned(), metrics);
    report.per_model_roc.insert(name.to_owned(), roc);
    report.test_scores.insert(name.to_owned(), probs);
    Ok(())
}

/// Preprocesses, trains all four models on `fold.train` and scores them on
/// `fold.test`. Only training rows reach any fit, including selection.
pub fn run_fold(
    features: &Table,
    labels: &[bool],
    fold_id: usize,
    fold: &Fold,
    config: &PipelineConfig,
) -> Result<(FoldReport, FoldArtifacts)> {
    let table = config.drop_key(features);
    let train_table = table.select_rows(&fold.train);
    let test_table = table.select_rows(&fold.test);
    let y_train: Vec<bool> = fold.train.iter().map(|&i| labels[i]).collect();
    let y_test: Vec<bool> = fold.test.iter().map(|&i| labels[i]).collect();

    let plan = fit_plan(&train_table, config.missingness_threshold)?;
    let train = plan.apply(&train_table, &y_train, true)?;
    let test = plan.apply(&test_table, &y_test, true)?;

    let l1 = linear::fit(&train, &config.l1)?;
    let l2 = linear::fit(&train, &config.l2)?;
    let mlp_full = mlp::train(&train, &with_seed(&config.mlp_full, fold_id as u64))?;

    let mut selection = select_with_fits(&train, &config.selection, &[&l1, &l2])?;
    selection.fold_id = Some(fold_id);
    let hybrid = train_hybrid(&train, &selection, &with_seed(&config.mlp_hybrid, fold_id as u64))?;

    let mut report = FoldReport {
        fold_id,
        train_indices: fold.train.clone(),
        test_indices: fold.test.clone(),
        per_model: BTreeMap::new(),
        per_model_roc: BTreeMap::new(),
        test_scores: BTreeMap::new(),
        selection: None,
    };
    let t = config.threshold;
    evaluate(L1_LOGISTIC, l1.predict_proba(test.view())?, &y_test, t, &mut report)?;
    evaluate(L2_LOGISTIC, l2.predict_proba(test.view())?, &y_test, t, &mut report)?;
    evaluate(MLP_FULL, mlp_full.forward(test.view())?, &y_test, t, &mut report)?;
    let test_sel = test.select_columns(&selection.selected_indices);
    evaluate(config.mode.hybrid_name(), hybrid.forward(test_sel.view())?, &y_test, t, &mut report)?;
    report.selection = Some(selection);

    Ok((
        report,
        FoldArtifacts {
            plan,
            l1,
            l2,
            mlp_full,
            hybrid,
        },
    ))
}

fn train_hybrid(train: &DesignMatrix, selection: &SelectionResult, config: &MlpConfig) -> Result<MlpModel> {
    mlp::train(&train.select_columns(&selection.selected_indices), config)
}

/// Stratified cross-validation over an already labeled feature table.
pub fn run_cv_labeled(features: &Table, labels: &[bool], config: &PipelineConfig) -> Result<CvOutcome> {
    config.validate()?;
    if features.row_count() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.row_count(),
            right: labels.len(),
        });
    }
    let folds = stratified_folds(labels, config.n_folds, config.seed)?;
    let run = |(id, fold): (usize, &Fold)| {
        run_fold(features, labels, id, fold, config).map_err(|e| Error::Fold {
            fold: id,
            source: Box::new(e),
        })
    };
    let results: Vec<(FoldReport, FoldArtifacts)> = if config.parallel_folds {
        folds.par_iter().enumerate().map(run).collect::<Result<_>>()?
    } else {
        folds.iter().enumerate().map(run).collect::<Result<_>>()?
    };
    let (reports, artifacts): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let metadata = serde_json::to_value(config)?;
    Ok(CvOutcome {
        report: RunReport::assemble(config, reports, metadata),
        artifacts,
    })
}

/// Derives labels with `rule`, then cross-validates the four models.
pub fn run_cv(table: &Table, rule: &LabelRule, config: &PipelineConfig) -> Result<RunReport> {
    let (features, labels) = derive_label(table, rule)?;
    Ok(run_cv_labeled(&features, &labels, config)?.report)
}

/// Artifacts of the full-data refit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalRefit {
    pub plan: PreprocessPlan,
    pub selection: SelectionResult,
    pub hybrid: MlpModel,
    /// Permutation importance over the selected features of the full matrix.
    pub importance: Vec<FeatureImportance>,
}

/// Refits preprocessing, selection and the hybrid head on every row and
/// ranks the selected features by permutation importance.
pub fn final_refit_labeled(features: &Table, labels: &[bool], config: &PipelineConfig) -> Result<FinalRefit> {
    config.validate()?;
    let table = config.drop_key(features);
    let plan = fit_plan(&table, config.missingness_threshold)?;
    let full = plan.apply(&table, labels, true)?;
    let fitted: Vec<LinearModel> = match config.selection.method {
        SelectionMethod::MutualInfo => Vec::new(),
        _ => vec![linear::fit(&full, &config.selection.scoring_penalty().unwrap())?],
    };
    let refs: Vec<&LinearModel> = fitted.iter().collect();
    let selection = select_with_fits(&full, &config.selection, &refs)?;
    let reduced = full.select_columns(&selection.selected_indices);
    let hybrid = mlp::train(&reduced, &config.mlp_hybrid)?;
    let importance = permutation_importance(
        &hybrid,
        reduced.view(),
        labels,
        &reduced.feature_names,
        config.importance_repeats,
        config.importance_seed,
    )?;
    Ok(FinalRefit {
        plan,
        selection,
        hybrid,
        importance,
    })
}

pub fn final_refit(table: &Table, rule: &LabelRule, config: &PipelineConfig) -> Result<FinalRefit> {
    let (features, labels) = derive_label(table, rule)?;
    final_refit_labeled(&features, &labels, config)
}
