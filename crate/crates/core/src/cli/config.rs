use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::eval::{PipelineConfig, PipelineMode};
use crate::ingest::{LabelRule, SampleSpec};
use crate::linear::PenaltyConfig;
use crate::mlp::MlpConfig;
use crate::select::{SelectionConfig, SelectionMethod};
use crate::synth::COMPONENT_FILES;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessSettings {
    pub missingness_threshold: f64,
}

impl Default for PreprocessSettings {
    fn default() -> Self {
        PreprocessSettings {
            missingness_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearSettings {
    pub l1: PenaltyConfig,
    pub l2: PenaltyConfig,
}

impl Default for LinearSettings {
    fn default() -> Self {
        let p = PipelineConfig::refined();
        LinearSettings { l1: p.l1, l2: p.l2 }
    }
}

/// Turns one long-format component (several rows per key) into indicator
/// columns before merging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotSettings {
    pub file: String,
    pub column: String,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

fn default_prefix() -> String {
    "RXDRUG".into()
}

/// Complete description of one `run` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub pipeline: PipelineMode,
    pub data_dir: PathBuf,
    pub file_names: Vec<String>,
    pub key_column: String,
    /// Cell values read as missing in addition to the empty string.
    pub missing_sentinels: Vec<String>,
    pub pivot: Option<PivotSettings>,
    pub label: LabelRule,
    pub sample: SampleSpec,
    pub preprocess: PreprocessSettings,
    pub selection: SelectionConfig,
    pub linear: LinearSettings,
    pub mlp_full: MlpConfig,
    pub mlp_hybrid: MlpConfig,
    pub n_folds: usize,
    /// Seed of the fold assignment and of permutation importance.
    pub seed: u64,
    pub threshold: f64,
    pub importance_repeats: usize,
    pub parallel_folds: bool,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Defaults of the given pipeline.
    pub fn defaults(pipeline: PipelineMode) -> Self {
        let p = match pipeline {
            PipelineMode::Prototype => PipelineConfig::prototype(),
            PipelineMode::Refined => PipelineConfig::refined(),
        };
        let (label, sample) = match pipeline {
            PipelineMode::Prototype => (
                LabelRule::prototype(),
                SampleSpec {
                    max_rows_per_table: Some(5000),
                    keep_fraction: 0.4,
                    seed: 42,
                },
            ),
            PipelineMode::Refined => (LabelRule::default(), SampleSpec::default()),
        };
        RunConfig {
            pipeline,
            data_dir: PathBuf::from("data"),
            file_names: COMPONENT_FILES.iter().map(|s| s.to_string()).collect(),
            key_column: "SEQN".into(),
            missing_sentinels: Vec::new(),
            pivot: None,
            label,
            sample,
            preprocess: PreprocessSettings {
                missingness_threshold: p.missingness_threshold,
            },
            selection: p.selection,
            linear: LinearSettings { l1: p.l1, l2: p.l2 },
            mlp_full: p.mlp_full,
            mlp_hybrid: p.mlp_hybrid,
            n_folds: p.n_folds,
            seed: p.seed,
            threshold: p.threshold,
            importance_repeats: p.importance_repeats,
            parallel_folds: false,
            output_dir: PathBuf::from("out"),
        }
    }

    /// Parses a JSON document over the defaults of its pipeline (or of
    /// `pipeline` when given), then applies flag overrides.
    pub fn resolve(json: Option<&str>, overrides: &Overrides) -> Result<Self> {
        let user: Value = match json {
            Some(text) => serde_json::from_str(text)?,
            None => Value::Object(Default::default()),
        };
        if !user.is_object() {
            return Err(Error::InvalidConfig("configuration must be a JSON object".into()));
        }
        let pipeline = match (overrides.pipeline, user.get("pipeline")) {
            (Some(p), _) => p,
            (None, Some(v)) => serde_json::from_value(v.clone())?,
            (None, None) => PipelineMode::Refined,
        };
        let mut merged = serde_json::to_value(Self::defaults(pipeline))?;
        deep_merge(&mut merged, user);
        let mut config: RunConfig = serde_json::from_value(merged)?;
        config.pipeline = pipeline;
        overrides.apply(&mut config);
        Ok(config)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::resolve(Some(json), &Overrides::default())
    }

    pub fn validate(&self) -> Result<()> {
        if self.file_names.is_empty() {
            return Err(Error::InvalidConfig("file_names is empty".into()));
        }
        self.label.validate()?;
        self.sample.validate()?;
        if let Some(p) = &self.pivot {
            if !self.file_names.contains(&p.file) {
                return Err(Error::InvalidConfig(format!("pivot file `{}` is not in file_names", p.file)));
            }
        }
        self.pipeline_config().validate()
    }

    /// The model-loop part of the configuration.
    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            mode: self.pipeline,
            key_column: Some(self.key_column.clone()),
            missingness_threshold: self.preprocess.missingness_threshold,
            l1: self.linear.l1.clone(),
            l2: self.linear.l2.clone(),
            mlp_full: self.mlp_full.clone(),
            mlp_hybrid: self.mlp_hybrid.clone(),
            selection: self.selection.clone(),
            n_folds: self.n_folds,
            seed: self.seed,
            threshold: self.threshold,
            importance_repeats: self.importance_repeats,
            importance_seed: self.seed,
            parallel_folds: self.parallel_folds,
        }
    }
}

fn deep_merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => deep_merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Command-line flags that take precedence over the JSON document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub pipeline: Option<PipelineMode>,
    pub data_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Replaces the fold, sampling and both network seeds.
    pub seed: Option<u64>,
    pub n_folds: Option<usize>,
    pub k: Option<usize>,
    pub select_method: Option<SelectionMethod>,
    pub parallel_folds: Option<bool>,
}

impl Overrides {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(d) = &self.data_dir {
            c.data_dir = d.clone();
        }
        if let Some(d) = &self.output_dir {
            c.output_dir = d.clone();
        }
        if let Some(s) = self.seed {
            c.seed = s;
            c.sample.seed = s;
            c.mlp_full.seed = s;
            c.mlp_hybrid.seed = s;
        }
        if let Some(n) = self.n_folds {
            c.n_folds = n;
        }
        if let Some(k) = self.k {
            c.selection.k = k;
            c.selection.fallback_k = k;
        }
        if let Some(m) = self.select_method {
            c.selection.method = m;
        }
        if let Some(p) = self.parallel_folds {
            c.parallel_folds = p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_refined_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::defaults(PipelineMode::Refined));
        c.validate().unwrap();
    }

    #[test]
    fn prototype_defaults_follow_pipeline() {
        let c = RunConfig::from_json(r#"{"pipeline": "prototype"}"#).unwrap();
        assert_eq!(c.sample.max_rows_per_table, Some(5000));
        assert_eq!(c.sample.keep_fraction, 0.4);
        assert_eq!(c.selection.method, SelectionMethod::PrototypeL1Nonzero);
        c.validate().unwrap();
    }

    #[test]
    fn nested_fields_merge_over_defaults() {
        let c = RunConfig::from_json(r#"{"selection": {"k": 7}, "mlp_hybrid": {"max_epochs": 3}}"#).unwrap();
        assert_eq!(c.selection.k, 7);
        assert_eq!(c.selection.mi_bins, 10);
        assert_eq!(c.mlp_hybrid.max_epochs, 3);
        assert_eq!(c.mlp_hybrid.hidden_sizes, vec![128, 64]);
    }

    #[test]
    fn flags_win() {
        let o = Overrides {
            n_folds: Some(5),
            k: Some(20),
            seed: Some(9),
            select_method: Some(SelectionMethod::MutualInfo),
            ..Default::default()
        };
        let c = RunConfig::resolve(Some(r#"{"n_folds": 4, "selection": {"k": 3}}"#), &o).unwrap();
        assert_eq!((c.n_folds, c.selection.k, c.seed, c.mlp_full.seed), (5, 20, 9, 9));
        assert_eq!(c.selection.method, SelectionMethod::MutualInfo);
    }

    #[test]
    fn unknown_top_level_field_rejected() {
        let e = RunConfig::from_json(r#"{"n_fold": 3}"#).unwrap_err();
        assert_eq!(e.class(), crate::ErrorClass::Config);
    }

    #[test]
    fn single_fold_invalid() {
        let c = RunConfig::from_json(r#"{"n_folds": 1}"#).unwrap();
        assert_eq!(c.validate().unwrap_err().class(), crate::ErrorClass::Config);
    }
}
