//! Prototype pipeline: keep every non-zero L1 coefficient, so the hybrid's
//! input width changes from fold to fold.

use hdlss_hybrid::eval::{run_cv_labeled, PipelineConfig};
use hdlss_hybrid::synth::{generate, SynthSpec};

fn main() -> hdlss_hybrid::Result<()> {
    let data = generate(&SynthSpec { n_samples: 600, n_features: 400, n_informative: 15, ..SynthSpec::default() })?;
    let out = run_cv_labeled(&data.table, &data.labels, &PipelineConfig { parallel_folds: true, ..PipelineConfig::prototype() })?;
    for fold in &out.report.folds {
        let sel = fold.selection.as_ref().unwrap();
        println!("fold {}: {} features selected, fallback {}", fold.fold_id, sel.len(), sel.fallback_used);
    }
    println!("mean Jaccard between folds {:.3}", out.report.selection_stability.mean_jaccard);
    for (name, m) in &out.report.mean_metrics {
        println!("{name:<17} auc {:.3}", m.auc);
    }
    Ok(())
}
