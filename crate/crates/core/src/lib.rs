//! Diabetes-style binary classification on high-dimensional,
//! low-sample-size tabular data.
//!
//! The crate contains every stage of two end-to-end pipelines:
//!
//! - [`ingest`]: CSV component loading, keyed inner join, row sampling and
//!   label derivation.
//! - [`preprocess`]: missingness filter, median/mode imputation, one-hot
//!   encoding, zero-variance pruning and standardization, fitted per fold.
//! - [`linear`]: L1 / L2 / elastic-net logistic regression by proximal
//!   coordinate descent with class-balanced weights.
//! - [`mlp`]: ReLU multilayer perceptron trained with Adam, weighted binary
//!   cross-entropy, weight decay and early stopping.
//! - [`select`]: top-k ranking by L1, elastic-net or mutual information, and
//!   the non-zero-L1 selector with an L2 top-k fallback.
//! - [`eval`]: metrics, ROC/AUC, stratified folds, the four-model
//!   cross-validation loop, permutation importance and the final refit.
//! - [`synth`]: seeded synthetic data with known informative features.
//! - [`cli`]: configuration, orchestration and report files.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod linear;
pub mod mlp;
pub mod preprocess;
pub mod select;
pub mod synth;

use ndarray::ArrayView2;

pub use error::{Error, ErrorClass, Result};
pub use preprocess::DesignMatrix;

/// Anything that maps feature rows to positive-class probabilities.
pub trait Classifier {
    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Vec<f64>>;
}
