//! L1, L2 and elastic-net logistic regression along a regularization path.

use hdlss_hybrid::linear::{fit, lambda_max, PenaltyConfig};
use hdlss_hybrid::preprocess::fit_plan;
use hdlss_hybrid::synth::{generate, SynthSpec};

fn main() -> hdlss_hybrid::Result<()> {
    let data = generate(&SynthSpec { n_samples: 200, n_features: 50, n_informative: 5, coefficient_scale: 1.5, ..SynthSpec::default() })?;
    let table = data.table.without_columns(&["SEQN"]);
    let x = fit_plan(&table, 0.5)?.apply(&table, &data.labels, true)?;

    let top = lambda_max(x.view(), &x.labels, true)?;
    println!("lambda_max = {top:.4}");
    for frac in [1.1, 0.5, 0.2, 0.1, 0.05, 0.02] {
        let m = fit(&x, &PenaltyConfig::l1(frac * top))?;
        println!("l1 lambda = {:.4}: {:>2} non-zero, {} sweeps", frac * top, m.nonzero_count(), m.n_iters_run);
    }

    let l2 = fit(&x, &PenaltyConfig::l2(0.02))?;
    let en = fit(&x, &PenaltyConfig::elastic_net(0.02, 0.5))?;
    println!("l2: {} non-zero, elastic net: {} non-zero", l2.nonzero_count(), en.nonzero_count());
    println!("true informative: {:?}", data.informative_names());
    let mut ranked: Vec<_> = en.weights.iter().zip(&x.feature_names).collect();
    ranked.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    println!("largest elastic-net weights: {:?}", &ranked[..5]);
    Ok(())
}
