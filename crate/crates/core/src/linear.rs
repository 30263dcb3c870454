//! Penalized logistic regression fitted by proximal coordinate descent.
//!
//! The objective is the class-weighted mean negative log-likelihood plus the
//! elastic-net penalty
//!
//! ```text
//! F(w, b) = sum_i a_i [log(1 + e^{eta_i}) - y_i eta_i]
//!         + lambda * (alpha * |w|_1 + (1 - alpha) / 2 * |w|_2^2),
//! eta_i = x_i . w + b,   a_i = s_i / sum_k s_k
//! ```
//!
//! where `s_i` are inverse-frequency class weights. Each coordinate step
//! minimizes a quadratic upper bound with curvature `0.25 * sum_i a_i x_ij^2`,
//! so every step (and therefore every sweep) is non-increasing in `F`. L1 is
//! the `alpha = 1` case and L2 is `alpha = 0`. The intercept is not penalized.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::DesignMatrix;
use crate::Classifier;

const EXP_CLAMP: f64 = 700.0;

/// Logistic function with the exponent clamped to `[-700, 700]`.
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z.clamp(-EXP_CLAMP, EXP_CLAMP)).exp())
}

/// `log(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// `sign(z) * max(|z| - gamma, 0)`
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Inverse-frequency class weights `n / (2 n_c)`, returned as `(w_pos, w_neg)`.
pub fn class_weights(labels: &[bool]) -> Result<(f64, f64)> {
    let n = labels.len();
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let n = n as f64;
    Ok((n / (2.0 * n_pos as f64), n / (2.0 * n_neg as f64)))
}

/// Per-sample weights, balanced or uniform.
pub fn sample_weights(labels: &[bool], class_balanced: bool) -> Result<Vec<f64>> {
    let (wp, wn) = if class_balanced {
        class_weights(labels)?
    } else {
        class_weights(labels)?;
        (1.0, 1.0)
    };
    Ok(labels.iter().map(|&y| if y { wp } else { wn }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyKind {
    L1,
    L2,
    ElasticNet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyConfig {
    pub kind: PenaltyKind,
    /// lambda
    pub strength: f64,
    /// alpha, used by elastic net only
    pub mixing: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub class_balanced: bool,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            kind: PenaltyKind::L1,
            strength: 0.02,
            mixing: 0.5,
            max_iters: 1000,
            tol: 1e-6,
            class_balanced: true,
        }
    }
}

impl PenaltyConfig {
    pub fn l1(strength: f64) -> Self {
        PenaltyConfig {
            kind: PenaltyKind::L1,
            strength,
            ..Default::default()
        }
    }

    pub fn l2(strength: f64) -> Self {
        PenaltyConfig {
            kind: PenaltyKind::L2,
            strength,
            ..Default::default()
        }
    }

    pub fn elastic_net(strength: f64, mixing: f64) -> Self {
        PenaltyConfig {
            kind: PenaltyKind::ElasticNet,
            strength,
            mixing,
            ..Default::default()
        }
    }

    pub fn with_kind(&self, kind: PenaltyKind) -> Self {
        PenaltyConfig {
            kind,
            ..self.clone()
        }
    }

    /// Effective L1 share of the penalty.
    pub fn alpha(&self) -> f64 {
        match self.kind {
            PenaltyKind::L1 => 1.0,
            PenaltyKind::L2 => 0.0,
            PenaltyKind::ElasticNet => self.mixing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength > 0.0 && self.strength.is_finite()) {
            return Err(Error::InvalidConfig(format!("penalty strength {} must be > 0", self.strength)));
        }
        if !(0.0..=1.0).contains(&self.mixing) {
            return Err(Error::InvalidConfig(format!("mixing {} outside [0, 1]", self.mixing)));
        }
        if !(self.tol > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidConfig("tol and max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub penalty: PenaltyConfig,
    pub n_iters_run: usize,
    pub converged: bool,
    /// Penalized objective after each sweep.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl LinearModel {
    pub fn decision_function(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: x.ncols(),
            });
        }
        let w = ArrayView1::from(&self.weights);
        Ok(x.rows().into_iter().map(|row| row.dot(&w) + self.intercept).collect())
    }

    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        Ok(self.decision_function(x)?.into_iter().map(sigmoid).collect())
    }

    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }
}

impl Classifier for LinearModel {
    fn predict_proba(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        LinearModel::predict_proba(self, x)
    }
}

fn check_inputs(x: ArrayView2<f64>, labels: &[bool]) -> Result<()> {
    if x.nrows() != labels.len() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: labels.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(())
}

fn normalized_weights(labels: &[bool], class_balanced: bool) -> Result<Vec<f64>> {
    let mut a = sample_weights(labels, class_balanced)?;
    let total: f64 = a.iter().sum();
    a.iter_mut().for_each(|v| *v /= total);
    Ok(a)
}

/// Smallest `lambda` at which the pure-L1 solution is identically zero:
/// `max_j |sum_i a_i x_ij (y_i - ybar_a)|` with `a` the normalized weights.
pub fn lambda_max(x: ArrayView2<f64>, labels: &[bool], class_balanced: bool) -> Result<f64> {
    check_inputs(x, labels)?;
    let a = normalized_weights(labels, class_balanced)?;
    let ybar: f64 = a.iter().zip(labels).filter(|(_, &y)| y).map(|(w, _)| w).sum();
    let resid: Vec<f64> = a
        .iter()
        .zip(labels)
        .map(|(w, &y)| w * (y as u8 as f64 - ybar))
        .collect();
    Ok(x
        .columns()
        .into_iter()
        .map(|c| c.iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>().abs())
        .fold(0.0, f64::max))
}

/// Weighted mean negative log-likelihood with its gradient, normalized by
/// the total sample weight. Returns `(loss, grad_weights, grad_intercept)`.
pub fn logistic_loss_and_gradient(
    x: ArrayView2<f64>,
    labels: &[bool],
    sample_weights: &[f64],
    weights: &[f64],
    intercept: f64,
) -> (f64, Vec<f64>, f64) {
    let total: f64 = sample_weights.iter().sum();
    let w = ArrayView1::from(weights);
    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for ((row, &y), &s) in x.rows().into_iter().zip(labels).zip(sample_weights) {
        let eta = row.dot(&w) + intercept;
        let y = y as u8 as f64;
        let a = s / total;
        loss += a * (softplus(eta) - y * eta);
        let r = a * (sigmoid(eta) - y);
        grad_b += r;
        for (g, xv) in grad.iter_mut().zip(row) {
            *g += r * xv;
        }
    }
    (loss, grad, grad_b)
}

/// Penalized objective `F(w, b)` at the given point.
pub fn objective(
    x: ArrayView2<f64>,
    labels: &[bool],
    weights: &[f64],
    intercept: f64,
    penalty: &PenaltyConfig,
) -> Result<f64> {
    check_inputs(x, labels)?;
    let a = normalized_weights(labels, penalty.class_balanced)?;
    let w = ArrayView1::from(weights);
    let eta: Vec<f64> = x.rows().into_iter().map(|r| r.dot(&w) + intercept).collect();
    Ok(penalized_objective(&eta, labels, &a, weights, penalty))
}

fn penalized_objective(eta: &[f64], labels: &[bool], a: &[f64], weights: &[f64], p: &PenaltyConfig) -> f64 {
    let data: f64 = eta
        .iter()
        .zip(labels)
        .zip(a)
        .map(|((&e, &y), &a)| a * (softplus(e) - if y { e } else { 0.0 }))
        .sum();
    let alpha = p.alpha();
    let l1: f64 = weights.iter().map(|w| w.abs()).sum();
    let l2: f64 = weights.iter().map(|w| w * w).sum();
    data + p.strength * (alpha * l1 + 0.5 * (1.0 - alpha) * l2)
}

/// Fits on a design matrix with ascending coordinate order.
pub fn fit(x: &DesignMatrix, penalty: &PenaltyConfig) -> Result<LinearModel> {
    fit_arrays(x.view(), &x.labels, penalty)
}

pub fn fit_arrays(x: ArrayView2<f64>, labels: &[bool], penalty: &PenaltyConfig) -> Result<LinearModel> {
    let order: Vec<usize> = (0..x.ncols()).collect();
    fit_with_order(x, labels, penalty, &order)
}

/// Coordinate descent visiting features in `order` on every sweep.
pub fn fit_with_order(
    x: ArrayView2<f64>,
    labels: &[bool],
    penalty: &PenaltyConfig,
    order: &[usize],
) -> Result<LinearModel> {
    penalty.validate()?;
    check_inputs(x, labels)?;
    let (n, p) = x.dim();
    let a = normalized_weights(labels, penalty.class_balanced)?;
    let y: Vec<f64> = labels.iter().map(|&y| y as u8 as f64).collect();

    // feature-major copy so each coordinate reads a contiguous slice
    let xt: Array2<f64> = x.t().as_standard_layout().into_owned();
    let curvature: Vec<f64> = xt
        .rows()
        .into_iter()
        .map(|c| 0.25 * c.iter().zip(&a).map(|(v, a)| a * v * v).sum::<f64>())
        .collect();

    let lambda = penalty.strength;
    let alpha = penalty.alpha();
    let l1 = lambda * alpha;
    let l2 = lambda * (1.0 - alpha);

    let ybar: f64 = a.iter().zip(&y).map(|(a, y)| a * y).sum();
    let mut intercept = (ybar / (1.0 - ybar)).ln();
    let mut weights = vec![0.0; p];
    let mut eta = vec![intercept; n];
    let mut prob: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
    // resid_i = a_i (p_i - y_i), so the gradient of coordinate j is x_j . resid
    let mut resid: Vec<f64> = (0..n).map(|i| a[i] * (prob[i] - y[i])).collect();

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;
    while iters < penalty.max_iters {
        iters += 1;
        let mut max_change: f64 = 0.0;

        // the intercept curvature bound is 0.25 * sum_i a_i = 0.25
        let step = -resid.iter().sum::<f64>() / 0.25;
        if step != 0.0 {
            intercept += step;
            for i in 0..n {
                eta[i] += step;
                prob[i] = sigmoid(eta[i]);
                resid[i] = a[i] * (prob[i] - y[i]);
            }
            max_change = max_change.max(step.abs());
        }

        for &j in order {
            let lj = curvature[j];
            if lj == 0.0 {
                continue;
            }
            let col = xt.row(j);
            let col = col.as_slice().expect("standard layout");
            let grad: f64 = col.iter().zip(&resid).map(|(x, r)| x * r).sum();
            let updated = soft_threshold(lj * weights[j] - grad, l1) / (lj + l2);
            let delta = updated - weights[j];
            if delta != 0.0 {
                weights[j] = updated;
                for i in 0..n {
                    eta[i] += delta * col[i];
                    prob[i] = sigmoid(eta[i]);
                    resid[i] = a[i] * (prob[i] - y[i]);
                }
                max_change = max_change.max(delta.abs());
            }
        }

        trace.push(penalized_objective(&eta, labels, &a, &weights, penalty));
        if !intercept.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if max_change < penalty.tol {
            converged = true;
            break;
        }
    }

    Ok(LinearModel {
        weights,
        intercept,
        penalty: penalty.clone(),
        n_iters_run: iters,
        converged,
        objective_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(1000.0) - 1.0).abs() < 1e-12);
        assert!(sigmoid(-1000.0) > 0.0);
        for z in [-30.0, -2.5, -0.1, 0.7, 3.0, 45.0] {
            assert!((sigmoid(z) + sigmoid(-z) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn soft_threshold_kernel() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn class_weight_cases() {
        let mut y = vec![false; 6];
        y.extend([true, true]);
        let (wp, wn) = class_weights(&y).unwrap();
        // n / (2 n_c) by hand: 8/4 and 8/12
        assert_eq!(wp, 2.0);
        assert!((wn - 8.0 / 12.0).abs() < 1e-15);
        assert!((wp * 2.0 - wn * 6.0).abs() < 1e-12);
        assert_eq!(class_weights(&[true, false]).unwrap(), (1.0, 1.0));
        assert!(matches!(class_weights(&[true, true]), Err(Error::SingleClass)));
    }

    #[test]
    fn separable_two_point_fit_matches_grid_search() {
        let x = array![[-1.0], [1.0]];
        let y = [false, true];
        let pen = PenaltyConfig {
            tol: 1e-12,
            max_iters: 100_000,
            ..PenaltyConfig::l2(1.0)
        };
        let m = fit_arrays(x.view(), &y, &pen).unwrap();
        assert!(m.weights[0] > 0.0);
        let probs = m.predict_proba(x.view()).unwrap();
        assert!(probs[0] < 0.5 && probs[1] > 0.5);

        // dense grid over (w, b) of the convex 1-D objective
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=4000 {
            let w = i as f64 * 1e-3;
            let f = objective(x.view(), &y, &[w], 0.0, &pen).unwrap();
            if f < best.0 {
                best = (f, w);
            }
        }
        assert!((m.weights[0] - best.1).abs() < 2e-3, "{} vs {}", m.weights[0], best.1);
        assert!(m.intercept.abs() < 1e-9);
    }

    #[test]
    fn zero_weights_give_half() {
        let m = LinearModel {
            weights: vec![0.0; 3],
            intercept: 0.0,
            penalty: PenaltyConfig::default(),
            n_iters_run: 0,
            converged: true,
            objective_trace: vec![],
        };
        let x = array![[1.0, 2.0, 3.0], [-4.0, 0.5, 9.0]];
        assert_eq!(m.predict_proba(x.view()).unwrap(), [0.5, 0.5]);
        assert!(matches!(
            m.predict_proba(array![[1.0]].view()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn doubling_positive_weight_raises_probability() {
        let mut m = LinearModel {
            weights: vec![0.3, -0.2],
            intercept: 0.1,
            penalty: PenaltyConfig::default(),
            n_iters_run: 0,
            converged: true,
            objective_trace: vec![],
        };
        let x = array![[2.0, 1.0]];
        let before = m.predict_proba(x.view()).unwrap()[0];
        m.weights[0] *= 2.0;
        assert!(m.predict_proba(x.view()).unwrap()[0] > before);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = array![[f64::NAN], [1.0]];
        assert!(matches!(
            fit_arrays(x.view(), &[true, false], &PenaltyConfig::default()),
            Err(Error::NonFiniteInput)
        ));
        let x = array![[0.0], [1.0]];
        assert!(matches!(
            fit_arrays(x.view(), &[true, true], &PenaltyConfig::default()),
            Err(Error::SingleClass)
        ));
        assert!(PenaltyConfig::l1(0.0).validate().is_err());
    }
}
