//! Train a one-hidden-layer MLP on XOR and check the gradients.

use hdlss_hybrid::mlp::{gradient_check, train_arrays, MlpConfig};
use ndarray::{array, concatenate, Axis};

fn main() -> hdlss_hybrid::Result<()> {
    let base = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
    let views: Vec<_> = (0..10).map(|_| base.view()).collect();
    let x = concatenate(Axis(0), &views).unwrap();
    let y: Vec<bool> = (0..10).flat_map(|_| [false, true, true, false]).collect();

    let config = MlpConfig {
        hidden_sizes: vec![8],
        learning_rate: 0.02,
        batch_size: 16,
        max_epochs: 200,
        patience: 200,
        weight_decay: 0.0,
        ..MlpConfig::default()
    };
    println!("max relative gradient error: {:.2e}", gradient_check(&config));

    let model = train_arrays(x.view(), &y, &config)?;
    let p = model.forward(base.view())?;
    println!("best epoch {} of {}", model.best_epoch, model.train_trace.len());
    for (row, prob) in base.rows().into_iter().zip(&p) {
        println!("{row} -> {prob:.3}");
    }
    Ok(())
}
