//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use hdlss_hybrid::ingest::{derive_label, merge_on_key, LabelRule, Table};
use hdlss_hybrid::preprocess::fit_plan;
use hdlss_hybrid::synth::{component_tables, generate, SynthData, SynthSpec};
use hdlss_hybrid::DesignMatrix;
use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mann-Whitney AUC by enumerating every (positive, negative) pair; ties ½.
pub fn brute_auc(labels: &[bool], scores: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        if !yi {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    if pairs == 0.0 {
        0.5
    } else {
        wins / pairs
    }
}

/// (tp, fp, tn, fn) by a plain loop.
pub fn hand_count(labels: &[bool], probs: &[f64], threshold: f64) -> (usize, usize, usize, usize) {
    let mut c = (0, 0, 0, 0);
    for (&y, &p) in labels.iter().zip(probs) {
        match (y, p >= threshold) {
            (true, true) => c.0 += 1,
            (false, true) => c.1 += 1,
            (false, false) => c.2 += 1,
            (true, false) => c.3 += 1,
        }
    }
    c
}

/// Weighted mean logistic NLL written out longhand, for finite differences.
pub fn logistic_nll(x: ArrayView2<f64>, labels: &[bool], sw: &[f64], w: &[f64], b: f64) -> f64 {
    let total: f64 = sw.iter().sum();
    let mut s = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let eta: f64 = x.row(i).iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
        let p = 1.0 / (1.0 + (-eta).exp());
        s += sw[i] * if y { -p.ln() } else { -(1.0 - p).ln() };
    }
    s / total
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-7)
}

/// Gaussian design with `informative` leading columns driving the label.
pub fn gaussian_design(n: usize, p: usize, informative: usize, scale: f64, seed: u64) -> DesignMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let x = Array2::from_shape_fn((n, p), |_| {
            let u: f64 = rng.random_range(-1.0..1.0);
            let v: f64 = rng.random_range(-1.0..1.0);
            u + v
        });
        let labels: Vec<bool> = (0..n)
            .map(|i| {
                let z: f64 = (0..informative).map(|j| scale * x[[i, j]]).sum();
                rng.random_bool(1.0 / (1.0 + (-z).exp()))
            })
            .collect();
        if labels.iter().any(|&y| y) && labels.iter().any(|&y| !y) {
            let names = (0..p).map(|j| format!("x{j}")).collect();
            return DesignMatrix::new(x, labels, names).unwrap();
        }
    }
}

/// Synthetic data rebuilt through the five-file layout and the refined
/// label rule, as the command line sees it.
pub fn synth_labeled(spec: &SynthSpec) -> (SynthData, Table, Vec<bool>) {
    let data = generate(spec).unwrap();
    let rule = LabelRule::default();
    let tables = component_tables(&data, &rule, spec.seed).unwrap();
    let merged = merge_on_key(&tables, "SEQN").unwrap();
    let (features, labels) = derive_label(&merged, &rule).unwrap();
    (data, features, labels)
}

/// Full standardized matrix of a generated table (key column removed).
pub fn synth_matrix(spec: &SynthSpec) -> (SynthData, DesignMatrix) {
    let data = generate(spec).unwrap();
    let table = data.table.without_columns(&["SEQN"]);
    let plan = fit_plan(&table, 0.5).unwrap();
    let x = plan.apply(&table, &data.labels, true).unwrap();
    (data, x)
}
