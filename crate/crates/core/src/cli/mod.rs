//! Configuration-driven orchestration behind the `hdlss` binary.
//!
//! A run loads the component CSVs, merges and labels them, cross-validates
//! the four models, refits the hybrid on all rows and writes
//!
//! ```text
//! run_report.json  metrics.csv  roc_<model>.csv  roc.svg
//! selection_folds.csv  importance.csv  plan.json  models/*.json
//! ```
//!
//! into the output directory.

mod config;
pub mod output;
mod svg;

use std::path::{Path, PathBuf};

use serde_json::json;

pub use config::{LinearSettings, Overrides, PivotSettings, PreprocessSettings, RunConfig};
pub use svg::roc_svg;

use crate::error::{Error, Result};
use crate::eval::{final_refit_labeled, roc_auc, run_cv_labeled, MeanMetrics, Metrics, RunReport};
use crate::ingest::{derive_label, load_csv_with, merge_on_key, pivot_indicators, subsample, LoadOptions, Table};
use crate::synth::{self, GroundTruth, SynthSpec};
use output::{fmt_sig, write_csv, write_json};

/// What a successful run leaves behind.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub report: RunReport,
    pub n_rows: usize,
    pub n_positive: usize,
}

/// Loads, merges, samples and labels the component files of `config`.
/// Returns the feature table (key column included) and the labels.
pub fn load_dataset(config: &RunConfig) -> Result<(Table, Vec<bool>)> {
    let opts = LoadOptions {
        missing_sentinels: config.missing_sentinels.clone(),
        max_rows: config.sample.max_rows_per_table,
    };
    let mut tables = Vec::with_capacity(config.file_names.len());
    for file in &config.file_names {
        let table = load_csv_with(config.data_dir.join(file), &config.key_column, &opts)?;
        let table = match &config.pivot {
            Some(p) if &p.file == file => pivot_indicators(&table, &config.key_column, &p.column, &p.prefix)?,
            _ => table,
        };
        tables.push(table);
    }
    let merged = merge_on_key(&tables, &config.key_column)?;
    let sampled = subsample(&merged, &config.sample)?;
    derive_label(&sampled, &config.label)
}

/// Executes the whole pipeline and writes every report file.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let pipeline = config.pipeline_config();
    let (features, labels) = load_dataset(config)?;

    let outcome = run_cv_labeled(&features, &labels, &pipeline)?;
    let refit = final_refit_labeled(&features, &labels, &pipeline)?;

    let mut report = outcome.report;
    let n_positive = labels.iter().filter(|&&y| y).count();
    let mut echo = serde_json::to_value(config)?;
    if let Some(obj) = echo.as_object_mut() {
        // Two runs differing only in destination must report identically.
        obj.remove("output_dir");
    }
    report.metadata = json!({
        "config": echo,
        "dataset": {
            "rows": labels.len(),
            "positives": n_positive,
            "columns": features.columns().len(),
        },
        "version": env!("CARGO_PKG_VERSION"),
    });

    let out = &config.output_dir;
    let models = out.join("models");
    std::fs::create_dir_all(&models).map_err(|e| Error::io(&models, e))?;

    write_json(&out.join("run_report.json"), &report)?;
    write_metrics_csv(&out.join("metrics.csv"), &report)?;

    let mut curves = Vec::new();
    for name in config.pipeline.model_names() {
        let (y, s) = report.pooled_scores(name, &labels);
        let (curve, auc) = roc_auc(&y, &s)?;
        let rows = curve
            .points
            .iter()
            .map(|p| vec![fmt_sig(p.fpr), fmt_sig(p.tpr), fmt_sig(p.threshold)]);
        write_csv(&out.join(format!("roc_{name}.csv")), &["fpr", "tpr", "threshold"], rows)?;
        curves.push((name.to_owned(), auc, curve));
    }
    let borrowed: Vec<_> = curves.iter().map(|(n, a, c)| (n.clone(), *a, c)).collect();
    let svg_path = out.join("roc.svg");
    std::fs::write(&svg_path, roc_svg(&borrowed)).map_err(|e| Error::io(&svg_path, e))?;

    let selection_rows = report.folds.iter().flat_map(|f| {
        f.selection.iter().flat_map(move |s| {
            s.selected_names.iter().zip(&s.selected_indices).enumerate().map(move |(rank, (name, &j))| {
                vec![f.fold_id.to_string(), (rank + 1).to_string(), name.clone(), fmt_sig(s.scores[j])]
            })
        })
    });
    write_csv(
        &out.join("selection_folds.csv"),
        &["fold_id", "rank", "feature_name", "score"],
        selection_rows,
    )?;

    let importance_rows = refit.importance.iter().enumerate().map(|(rank, f)| {
        vec![
            (rank + 1).to_string(),
            f.feature_name.clone(),
            fmt_sig(f.importance_mean),
            fmt_sig(f.importance_std),
        ]
    });
    write_csv(
        &out.join("importance.csv"),
        &["rank", "feature_name", "importance_mean", "importance_std"],
        importance_rows,
    )?;

    write_json(&out.join("plan.json"), &refit.plan)?;
    let hybrid = config.pipeline.hybrid_name();
    for (i, a) in outcome.artifacts.iter().enumerate() {
        write_json(&models.join(format!("fold{i}_plan.json")), &a.plan)?;
        write_json(&models.join(format!("fold{i}_l1_logistic.json")), &a.l1)?;
        write_json(&models.join(format!("fold{i}_l2_logistic.json")), &a.l2)?;
        write_json(&models.join(format!("fold{i}_mlp_full.json")), &a.mlp_full)?;
        write_json(&models.join(format!("fold{i}_{hybrid}.json")), &a.hybrid)?;
    }
    write_json(&models.join("final_hybrid.json"), &refit.hybrid)?;
    write_json(&models.join("final_selection.json"), &refit.selection)?;

    Ok(RunSummary {
        output_dir: out.clone(),
        report,
        n_rows: labels.len(),
        n_positive,
    })
}

fn metric_cells(m: &Metrics) -> [String; 5] {
    [m.accuracy, m.precision, m.recall, m.f1, m.auc].map(fmt_sig)
}

fn mean_cells(m: &MeanMetrics) -> [String; 5] {
    [m.accuracy, m.precision, m.recall, m.f1, m.auc].map(fmt_sig)
}

fn write_metrics_csv(path: &Path, report: &RunReport) -> Result<()> {
    let mut rows = Vec::new();
    for name in report.mode.model_names() {
        for f in &report.folds {
            let mut row = vec![name.to_owned(), f.fold_id.to_string()];
            row.extend(metric_cells(&f.per_model[name]));
            rows.push(row);
        }
        let mut row = vec![name.to_owned(), "mean".to_owned()];
        row.extend(mean_cells(&report.mean_metrics[name]));
        rows.push(row);
    }
    write_csv(path, &["model", "fold", "accuracy", "precision", "recall", "f1", "auc"], rows)
}

/// Writes the five synthetic component files and `ground_truth.json`.
pub fn gen_synth(spec: &SynthSpec, out_dir: &Path) -> Result<GroundTruth> {
    synth::write_components(spec, out_dir)
}
