use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::roc::roc_auc;
use crate::error::{Error, Result};
use crate::Classifier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature_name: String,
    pub importance_mean: f64,
    pub importance_std: f64,
}

/// AUC drop when one column at a time is shuffled, averaged over `repeats`
/// shuffles. Features are sorted by descending mean importance, ties by
/// column order.
///
/// Every feature draws its permutations from its own generator derived from
/// `seed` and the column index, so the result does not depend on how the
/// columns are scheduled across threads.
pub fn permutation_importance<C>(
    model: &C,
    x: ArrayView2<f64>,
    labels: &[bool],
    names: &[String],
    repeats: usize,
    seed: u64,
) -> Result<Vec<FeatureImportance>>
where
    C: Classifier + Sync + ?Sized,
{
    if names.len() != x.ncols() {
        return Err(Error::LengthMismatch {
            left: names.len(),
            right: x.ncols(),
        });
    }
    if repeats == 0 {
        return Err(Error::InvalidConfig("importance repeats must be positive".into()));
    }
    let baseline = roc_auc(labels, &model.predict_proba(x)?)?.1;

    let per_feature: Vec<(usize, f64, f64)> = (0..x.ncols())
        .into_par_iter()
        .map(|j| -> Result<(usize, f64, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut shuffled = x.to_owned();
            let original: Vec<f64> = x.column(j).to_vec();
            let mut perm = original.clone();
            let mut drops = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                perm.copy_from_slice(&original);
                perm.shuffle(&mut rng);
                shuffled.column_mut(j).iter_mut().zip(&perm).for_each(|(d, &v)| *d = v);
                let auc = roc_auc(labels, &model.predict_proba(shuffled.view())?)?.1;
                drops.push(baseline - auc);
            }
            let mean = drops.iter().sum::<f64>() / repeats as f64;
            let var = drops.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / repeats as f64;
            Ok((j, mean, var.sqrt()))
        })
        .collect::<Result<_>>()?;

    let mut ranked = per_feature;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked
        .into_iter()
        .map(|(j, mean, std)| FeatureImportance {
            feature_name: names[j].clone(),
            importance_mean: mean,
            importance_std: std,
        })
        .collect())
}
