//! Refined pipeline: stratified 3-fold CV of the four models with exact
//! top-k selection feeding the hybrid MLP.

use hdlss_hybrid::eval::{run_cv_labeled, PipelineConfig};
use hdlss_hybrid::select::SelectionConfig;
use hdlss_hybrid::synth::{generate, SynthSpec};

fn main() -> hdlss_hybrid::Result<()> {
    let data = generate(&SynthSpec { n_samples: 600, n_features: 300, n_informative: 10, coefficient_scale: 1.5, missing_fraction: 0.05, ..SynthSpec::default() })?;
    let config = PipelineConfig {
        selection: SelectionConfig { k: 30, ..SelectionConfig::default() },
        parallel_folds: true,
        ..PipelineConfig::refined()
    };
    let out = run_cv_labeled(&data.table, &data.labels, &config)?;
    for (name, m) in &out.report.mean_metrics {
        println!("{name:<12} acc {:.3}  f1 {:.3}  auc {:.3}", m.accuracy, m.f1, m.auc);
    }
    let s = &out.report.selection_stability;
    println!("selected per fold {:?}, mean Jaccard {:.3}", s.counts, s.mean_jaccard);
    Ok(())
}
