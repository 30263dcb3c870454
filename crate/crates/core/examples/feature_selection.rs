//! Compare L1, elastic-net and mutual-information top-k selection against
//! the generator's ground truth, plus the variable-size prototype selector.

use hdlss_hybrid::preprocess::fit_plan;
use hdlss_hybrid::select::{select, SelectionConfig, SelectionMethod};
use hdlss_hybrid::synth::{generate, SynthSpec};

fn main() -> hdlss_hybrid::Result<()> {
    let spec = SynthSpec { n_samples: 500, n_features: 1000, n_informative: 20, coefficient_scale: 2.0, ..SynthSpec::default() };
    let data = generate(&spec)?;
    let table = data.table.without_columns(&["SEQN"]);
    let x = fit_plan(&table, 0.5)?.apply(&table, &data.labels, true)?;
    let truth = data.informative_names();

    for method in [SelectionMethod::L1, SelectionMethod::ElasticNet, SelectionMethod::MutualInfo] {
        let r = select(&x, &SelectionConfig { method, k: 20, ..SelectionConfig::default() })?;
        let hits = r.selected_names.iter().filter(|n| truth.contains(n)).count();
        println!("{:<12} top-20 recovers {hits}/20", method.as_str());
    }
    let proto = select(&x, &SelectionConfig { method: SelectionMethod::PrototypeL1Nonzero, ..SelectionConfig::default() })?;
    println!("prototype keeps {} features (fallback used: {})", proto.len(), proto.fallback_used);
    Ok(())
}
