//! Feedforward binary classifier: ReLU hidden layers and a sigmoid output,
//! trained on class-weighted binary cross-entropy plus L2 weight decay with
//! mini-batch Adam and validation-based early stopping.
//!
//! The training objective for a batch of `n` rows is
//!
//! ```text
//! (1/n) sum_i c_{y_i} BCE(p_i, y_i) + (weight_decay / 2) sum_layers |W|^2
//! ```
//!
//! with `c` the inverse-frequency class weights of the training data.
//! Biases are not decayed.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{class_weights, sigmoid, softplus};
use crate::preprocess::DesignMatrix;
use crate::Classifier;

const PROB_CLAMP: f64 = 1e-12;
const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden_sizes: Vec<usize>,
    pub weight_decay: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub val_fraction: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_sizes: vec![64, 32],
            weight_decay: 1e-4,
            learning_rate: 1e-3,
            batch_size: 64,
            max_epochs: 200,
            patience: 10,
            val_fraction: 0.1,
            seed: 42,
        }
    }
}

impl MlpConfig {
    /// Full-feature baseline, hidden widths (64, 32).
    pub fn baseline() -> Self {
        Self::default()
    }

    /// Hybrid head, hidden widths (128, 64).
    pub fn hybrid() -> Self {
        MlpConfig {
            hidden_sizes: vec![128, 64],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("mlp: {m}")));
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return bad("need at least one hidden layer of positive width");
        }
        if !(self.val_fraction > 0.0 && self.val_fraction <= 0.5) {
            return bad("val_fraction must lie in (0, 0.5]");
        }
        if !(self.learning_rate > 0.0) || !(self.weight_decay >= 0.0) {
            return bad("learning_rate must be > 0 and weight_decay >= 0");
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return bad("batch_size, max_epochs and patience must be positive");
        }
        Ok(())
    }
}

/// Fully connected layer; `weights` is `inputs x outputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayerRepr", into = "LayerRepr")]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Serialize, Deserialize)]
struct LayerRepr {
    inputs: usize,
    outputs: usize,
    /// row-major, `inputs * outputs` values
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl From<DenseLayer> for LayerRepr {
    fn from(l: DenseLayer) -> Self {
        let (inputs, outputs) = l.weights.dim();
        LayerRepr {
            inputs,
            outputs,
            weights: l.weights.as_standard_layout().iter().copied().collect(),
            bias: l.bias.to_vec(),
        }
    }
}

impl TryFrom<LayerRepr> for DenseLayer {
    type Error = String;

    fn try_from(r: LayerRepr) -> std::result::Result<Self, String> {
        if r.bias.len() != r.outputs {
            return Err(format!("bias has {} entries, expected {}", r.bias.len(), r.outputs));
        }
        let weights = Array2::from_shape_vec((r.inputs, r.outputs), r.weights).map_err(|e| e.to_string())?;
        Ok(DenseLayer {
            weights,
            bias: Array1::from(r.bias),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    /// Largest weight magnitude at the end of the epoch.
    pub max_abs_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<DenseLayer>,
    pub config: MlpConfig,
    /// 1-based epoch whose parameters were restored; 0 for an untrained net.
    pub best_epoch: usize,
    pub train_trace: Vec<EpochRecord>,
}

/// Parameter gradients, one `(d_weights, d_bias)` pair per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

struct ForwardCache {
    /// Layer inputs: `inputs[0]` is the batch, `inputs[l]` the ReLU output of layer `l - 1`.
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of each layer.
    pre: Vec<Array2<f64>>,
}

impl MlpModel {
    /// He-uniform weights and zero biases for the architecture
    /// `n_inputs -> hidden_sizes... -> 1`.
    pub fn init<R: Rng>(n_inputs: usize, config: &MlpConfig, rng: &mut R) -> Self {
        let mut widths = vec![n_inputs];
        widths.extend(&config.hidden_sizes);
        widths.push(1);
        let layers = widths
            .windows(2)
            .map(|w| {
                let limit = (6.0 / w[0] as f64).sqrt();
                DenseLayer {
                    weights: Array2::from_shape_simple_fn((w[0], w[1]), || rng.random_range(-limit..limit)),
                    bias: Array1::zeros(w[1]),
                }
            })
            .collect();
        MlpModel {
            layers,
            config: config.clone(),
            best_epoch: 0,
            train_trace: Vec::new(),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    fn check_width(&self, x: ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                got: x.ncols(),
            });
        }
        Ok(())
    }

    fn forward_cached(&self, x: ArrayView2<f64>) -> ForwardCache {
        let mut inputs = vec![x.to_owned()];
        let mut pre = Vec::with_capacity(self.layers.len());
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let z = inputs[l].dot(&layer.weights) + &layer.bias;
            if l < last {
                inputs.push(z.mapv(|v| v.max(0.0)));
            }
            pre.push(z);
        }
        ForwardCache { inputs, pre }
    }

    /// Output logits, one per row.
    pub fn logits(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        self.check_width(x)?;
        let cache = self.forward_cached(x);
        Ok(cache.pre.last().unwrap().column(0).to_vec())
    }

    /// Positive-class probabilities: ReLU hidden layers, sigmoid output.
    pub fn forward(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        Ok(self.logits(x)?.into_iter().map(sigmoid).collect())
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter())
            .fold(0.0, |m, w| m.max(w.abs()))
    }

    pub fn weight_norm_sq(&self) -> f64 {
        self.layers.iter().map(|l| l.weights.iter().map(|w| w * w).sum::<f64>()).sum()
    }

    /// Objective value and its gradient with respect to every parameter.
    pub fn loss_and_gradients(
        &self,
        x: ArrayView2<f64>,
        labels: &[bool],
        class_w: (f64, f64),
        weight_decay: f64,
    ) -> Result<(f64, Gradients)> {
        self.check_width(x)?;
        if x.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: x.nrows(),
                right: labels.len(),
            });
        }
        let n = x.nrows() as f64;
        let cache = self.forward_cached(x);
        let logits = cache.pre.last().unwrap().column(0);
        let probs: Vec<f64> = logits.iter().map(|&z| sigmoid(z)).collect();
        let loss = weighted_bce(&probs, labels, class_w) + 0.5 * weight_decay * self.weight_norm_sq();

        let mut delta = Array2::from_shape_fn((labels.len(), 1), |(i, _)| {
            let c = if labels[i] { class_w.0 } else { class_w.1 };
            c * (probs[i] - labels[i] as u8 as f64) / n
        });
        let mut grads = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let mut dw = cache.inputs[l].t().dot(&delta);
            dw.scaled_add(weight_decay, &layer.weights);
            let db = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut back = delta.dot(&layer.weights.t());
                back.zip_mut_with(&cache.pre[l - 1], |d, &z| {
                    if z <= 0.0 {
                        *d = 0.0;
                    }
                });
                delta = back;
            }
            grads.push((dw, db));
        }
        grads.reverse();
        Ok((loss, Gradients { layers: grads }))
    }
}

impl Classifier for MlpModel {
    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        self.forward(x)
    }
}

/// Mean class-weighted binary cross-entropy; probabilities are clamped to
/// `[1e-12, 1 - 1e-12]`.
pub fn weighted_bce(probs: &[f64], labels: &[bool], class_w: (f64, f64)) -> f64 {
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            if y {
                -class_w.0 * p.ln()
            } else {
                -class_w.1 * (1.0 - p).ln()
            }
        })
        .sum();
    total / probs.len() as f64
}

/// Stratified split of row indices into (train, validation).
fn stratified_holdout<R: Rng>(labels: &[bool], fraction: f64, rng: &mut R) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(rng);
        let n_val = ((fraction * idx.len() as f64).round() as usize).max(1);
        if n_val >= idx.len() {
            return Err(Error::InvalidConfig(format!(
                "validation split of {fraction} leaves no training rows for a class of {}",
                idx.len()
            )));
        }
        val.extend_from_slice(&idx[..n_val]);
        train.extend_from_slice(&idx[n_val..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    Ok((train, val))
}

struct Adam {
    m: Vec<(Array2<f64>, Array1<f64>)>,
    v: Vec<(Array2<f64>, Array1<f64>)>,
    t: i32,
}

impl Adam {
    fn new(model: &MlpModel) -> Self {
        let zeros: Vec<_> = model
            .layers
            .iter()
            .map(|l| (Array2::zeros(l.weights.raw_dim()), Array1::zeros(l.bias.len())))
            .collect();
        Adam {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    fn step(&mut self, model: &mut MlpModel, grads: &Gradients, lr: f64) {
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t);
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + ADAM_EPS);
        };
        for (l, layer) in model.layers.iter_mut().enumerate() {
            let (gw, gb) = &grads.layers[l];
            let (mw, mb) = &mut self.m[l];
            let (vw, vb) = &mut self.v[l];
            ndarray::Zip::from(&mut layer.weights)
                .and(mw)
                .and(vw)
                .and(gw)
                .for_each(|p, m, v, &g| update(p, m, v, g));
            ndarray::Zip::from(&mut layer.bias)
                .and(mb)
                .and(vb)
                .and(gb)
                .for_each(|p, m, v, &g| update(p, m, v, g));
        }
    }
}

pub fn train(x: &DesignMatrix, config: &MlpConfig) -> Result<MlpModel> {
    train_arrays(x.view(), &x.labels, config)
}

/// Trains with early stopping and returns the parameters of the epoch with
/// the lowest validation loss. Deterministic for a fixed `config.seed`.
pub fn train_arrays(x: ArrayView2<f64>, labels: &[bool], config: &MlpConfig) -> Result<MlpModel> {
    config.validate()?;
    if x.nrows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: labels.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let class_w = class_weights(labels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = MlpModel::init(x.ncols(), config, &mut rng);

    let (train_idx, val_idx) = stratified_holdout(labels, config.val_fraction, &mut rng)?;
    let x_train = x.select(Axis(0), &train_idx);
    let y_train: Vec<bool> = train_idx.iter().map(|&i| labels[i]).collect();
    let x_val = x.select(Axis(0), &val_idx);
    let y_val: Vec<bool> = val_idx.iter().map(|&i| labels[i]).collect();

    let mut adam = Adam::new(&model);
    let mut order: Vec<usize> = (0..train_idx.len()).collect();
    let mut best_layers = model.layers.clone();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0;
    let mut stale = 0;
    let mut trace = Vec::new();

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let xb = x_train.select(Axis(0), batch);
            let yb: Vec<bool> = batch.iter().map(|&i| y_train[i]).collect();
            let (_, grads) = model.loss_and_gradients(xb.view(), &yb, class_w, config.weight_decay)?;
            adam.step(&mut model, &grads, config.learning_rate);
        }
        let train_loss = weighted_bce(&model.forward(x_train.view())?, &y_train, class_w);
        let val_loss = weighted_bce(&model.forward(x_val.view())?, &y_val, class_w);
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        trace.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            max_abs_weight: model.max_abs_weight(),
        });
        if val_loss < best_val {
            best_val = val_loss;
            best_epoch = epoch;
            best_layers.clone_from(&model.layers);
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    model.layers = best_layers;
    model.best_epoch = best_epoch;
    model.train_trace = trace;
    Ok(model)
}

/// Compares analytic gradients against central finite differences on a
/// small random network derived from `config` (widths capped at 8, 12 rows)
/// and returns the largest relative error.
pub fn gradient_check(config: &MlpConfig) -> f64 {
    const STEP: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_inputs = 5;
    let n = 12;
    let hidden: Vec<usize> = config.hidden_sizes.iter().map(|&h| h.clamp(1, 8)).collect();
    let small = MlpConfig {
        hidden_sizes: if hidden.is_empty() { vec![4] } else { hidden },
        ..config.clone()
    };
    // Redraw until every hidden pre-activation is clear of the ReLU kink, so
    // no perturbation crosses it.
    let (mut model, x) = loop {
        let mut model = MlpModel::init(n_inputs, &small, &mut rng);
        for layer in &mut model.layers {
            layer.bias.mapv_inplace(|_| rng.random_range(-0.1..0.1));
        }
        let x = Array2::from_shape_simple_fn((n, n_inputs), || rng.sample::<f64, _>(StandardNormal));
        let cache = model.forward_cached(x.view());
        let hidden = &cache.pre[..cache.pre.len() - 1];
        if hidden.iter().all(|z| z.iter().all(|v| v.abs() > 1e-3)) {
            break (model, x);
        }
    };
    let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
    labels[0] = true;
    labels[1] = false;
    let class_w = class_weights(&labels).expect("both classes present");
    let decay = config.weight_decay;

    let (_, grads) = model
        .loss_and_gradients(x.view(), &labels, class_w, decay)
        .expect("shapes are consistent");
    // Only the perturbed weight's own square changes in the decay term, so
    // it is differenced separately; folding the whole of |W|^2 into each
    // evaluation would swamp small gradients in round-off.
    // Evaluated from logits through softplus; 1 - sigmoid(z) would lose
    // digits for confident rows.
    let data_loss = |m: &MlpModel| {
        let z = m.logits(x.view()).unwrap();
        z.iter()
            .zip(&labels)
            .map(|(&z, &y)| if y { class_w.0 * softplus(-z) } else { class_w.1 * softplus(z) })
            .sum::<f64>()
            / n as f64
    };
    // Central differences at this step carry ~1e-11 of round-off, so the
    // denominator is floored at 1e-6 to keep the ratio meaningful.
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-6);

    let mut worst: f64 = 0.0;
    for l in 0..model.layers.len() {
        for idx in 0..model.layers[l].weights.len() {
            let (r, c) = (idx / model.layers[l].weights.ncols(), idx % model.layers[l].weights.ncols());
            let orig = model.layers[l].weights[[r, c]];
            model.layers[l].weights[[r, c]] = orig + STEP;
            let up = data_loss(&model);
            model.layers[l].weights[[r, c]] = orig - STEP;
            let down = data_loss(&model);
            model.layers[l].weights[[r, c]] = orig;
            let decay_fd = 0.5 * decay * ((orig + STEP).powi(2) - (orig - STEP).powi(2)) / (2.0 * STEP);
            worst = worst.max(rel(grads.layers[l].0[[r, c]], (up - down) / (2.0 * STEP) + decay_fd));
        }
        for k in 0..model.layers[l].bias.len() {
            let orig = model.layers[l].bias[k];
            model.layers[l].bias[k] = orig + STEP;
            let up = data_loss(&model);
            model.layers[l].bias[k] = orig - STEP;
            let down = data_loss(&model);
            model.layers[l].bias[k] = orig;
            worst = worst.max(rel(grads.layers[l].1[k], (up - down) / (2.0 * STEP)));
        }
    }
    worst
}
