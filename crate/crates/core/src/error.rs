//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class used by the command line front end for exit codes and
/// diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Train,
}

#[derive(Debug, Error)]
pub enum Error {
    // ingest
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("malformed csv {}: {reason}", path.display())]
    MalformedCsv { path: PathBuf, reason: String },
    #[error("table `{table}` has no key column `{key}`")]
    MissingKeyColumn { table: String, key: String },
    #[error("merged tables share no keys")]
    EmptyIntersection,
    #[error("label column `{0}` not found")]
    MissingLabelColumn(String),
    #[error("no rows carry a valid label")]
    NoValidRows,

    // preprocess
    #[error("every column exceeded the missingness threshold {threshold}")]
    AllColumnsDropped { threshold: f64 },
    #[error("schema mismatch: column `{0}` missing or of the wrong kind")]
    SchemaMismatch(String),

    // models
    #[error("labels contain a single class")]
    SingleClass,
    #[error("input contains non-finite values")]
    NonFiniteInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    NonFiniteLoss { epoch: usize },

    // select / eval
    #[error("k = {k} exceeds feature count {available}")]
    KTooLarge { k: usize, available: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("class with {count} members cannot fill {folds} folds")]
    ClassTooSmall { count: usize, folds: usize },
    #[error("fold {fold} failed: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    // synth / config
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidConfig(_) | InvalidSpec(_) | Json(_) => ErrorClass::Config,
            FileNotFound(_) | MalformedCsv { .. } | MissingKeyColumn { .. } | EmptyIntersection
            | MissingLabelColumn(_) | NoValidRows | AllColumnsDropped { .. }
            | SchemaMismatch(_) | ClassTooSmall { .. } | LengthMismatch { .. } | Io { .. } => {
                ErrorClass::Data
            }
            SingleClass | NonFiniteInput | DimensionMismatch { .. } | NonFiniteLoss { .. }
            | KTooLarge { .. } => ErrorClass::Train,
            Fold { source, .. } => source.class(),
        }
    }

    /// Name of the library module that raised the error.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            FileNotFound(_) | MalformedCsv { .. } | MissingKeyColumn { .. } | EmptyIntersection
            | MissingLabelColumn(_) | NoValidRows => "ingest",
            AllColumnsDropped { .. } | SchemaMismatch(_) => "preprocess",
            SingleClass | NonFiniteInput => "linear",
            DimensionMismatch { .. } | NonFiniteLoss { .. } => "mlp",
            KTooLarge { .. } => "select",
            LengthMismatch { .. } | ClassTooSmall { .. } => "eval",
            Fold { source, .. } => source.module(),
            InvalidSpec(_) => "synth",
            InvalidConfig(_) | Io { .. } | Json(_) => "cli",
        }
    }
}
