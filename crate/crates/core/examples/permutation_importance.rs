//! Refit the hybrid on all rows and rank its inputs by permutation
//! importance (AUC drop).

use hdlss_hybrid::eval::{final_refit_labeled, PipelineConfig};
use hdlss_hybrid::select::SelectionConfig;
use hdlss_hybrid::synth::{generate, SynthSpec};

fn main() -> hdlss_hybrid::Result<()> {
    let data = generate(&SynthSpec { n_samples: 500, n_features: 200, n_informative: 6, coefficient_scale: 2.0, ..SynthSpec::default() })?;
    let config = PipelineConfig {
        selection: SelectionConfig { k: 15, ..SelectionConfig::default() },
        ..PipelineConfig::refined()
    };
    let refit = final_refit_labeled(&data.table, &data.labels, &config)?;
    let truth = data.informative_names();
    for (rank, f) in refit.importance.iter().enumerate() {
        let mark = if truth.contains(&f.feature_name) { "*" } else { "" };
        println!("{:>2}. {:<6}{mark:<2} {:.4} +/- {:.4}", rank + 1, f.feature_name, f.importance_mean, f.importance_std);
    }
    println!("* = informative in the generator");
    Ok(())
}
