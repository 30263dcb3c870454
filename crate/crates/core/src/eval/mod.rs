//! Metrics, ROC analysis, stratified cross-validation, permutation
//! importance and the full-data refit.

mod cv;
mod folds;
mod importance;
mod metrics;
mod roc;

pub use cv::{
    final_refit, final_refit_labeled, run_cv, run_cv_labeled, run_fold, CvOutcome, FinalRefit, FoldArtifacts,
    FoldReport, JaccardPair, PipelineConfig, PipelineMode, RunReport, SelectionStability, HYBRID_PROTOTYPE,
    HYBRID_TOPK, L1_LOGISTIC, L2_LOGISTIC, MLP_FULL,
};
pub use folds::{stratified_folds, Fold};
pub use importance::{permutation_importance, FeatureImportance};
pub use metrics::{confusion_metrics, Confusion, MeanMetrics, Metrics};
pub use roc::{roc_auc, RocCurve, RocPoint};
