//! Write a synthetic five-file dataset and run the full command-line
//! pipeline on it.

use hdlss_hybrid::cli::{self, Overrides, RunConfig};
use hdlss_hybrid::synth::SynthSpec;

fn main() -> hdlss_hybrid::Result<()> {
    let root = std::env::temp_dir().join("hdlss_example");
    let spec = SynthSpec { n_samples: 400, n_features: 120, n_informative: 8, missing_fraction: 0.05, categorical_fraction: 0.1, ..SynthSpec::default() };
    let truth = cli::gen_synth(&spec, &root.join("data"))?;
    println!("informative features {:?}", truth.informative_names);

    let config = RunConfig::resolve(
        Some(r#"{"selection": {"k": 20}, "importance_repeats": 3}"#),
        &Overrides {
            data_dir: Some(root.join("data")),
            output_dir: Some(root.join("out")),
            ..Overrides::default()
        },
    )?;
    let summary = cli::run(&config)?;
    println!("{} rows, {} positive", summary.n_rows, summary.n_positive);
    for (name, m) in &summary.report.mean_metrics {
        println!("{name:<12} auc {:.3}", m.auc);
    }
    println!("reports in {}", summary.output_dir.display());
    Ok(())
}
