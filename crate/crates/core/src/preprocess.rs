//! Leak-free preprocessing: a [`PreprocessPlan`] is fitted on training rows
//! only and then applied unchanged to any other rows.
//!
//! Fitting runs in this order:
//!
//! 1. drop source columns whose missing fraction exceeds the threshold,
//! 2. record medians (numeric) and modes (categorical) from observed cells,
//! 3. build sorted one-hot vocabularies and encode,
//! 4. prune encoded columns with zero variance,
//! 5. record per-feature mean and population standard deviation.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ColumnData, Table};

/// Dense numeric design matrix with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    pub values: Array2<f64>,
    pub labels: Vec<bool>,
    pub feature_names: Vec<String>,
}

impl DesignMatrix {
    pub fn new(values: Array2<f64>, labels: Vec<bool>, feature_names: Vec<String>) -> Result<Self> {
        if values.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: values.nrows(),
                right: labels.len(),
            });
        }
        if values.ncols() != feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                got: values.ncols(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(DesignMatrix {
            values,
            labels,
            feature_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn select_columns(&self, cols: &[usize]) -> DesignMatrix {
        DesignMatrix {
            values: self.values.select(Axis(1), cols),
            labels: self.labels.clone(),
            feature_names: cols.iter().map(|&c| self.feature_names[c].clone()).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> DesignMatrix {
        DesignMatrix {
            values: self.values.select(Axis(0), rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessPlan {
    pub missingness_threshold: f64,
    /// Source columns that survived the missingness filter, in table order.
    pub kept_columns: Vec<String>,
    pub numeric_medians: BTreeMap<String, f64>,
    pub categorical_modes: BTreeMap<String, String>,
    /// Sorted category list per categorical column.
    pub onehot_vocab: BTreeMap<String, Vec<String>>,
    /// Encoded column names before zero-variance pruning.
    pub encoded_names: Vec<String>,
    /// Positions in `encoded_names` that survive pruning.
    pub kept_encoded: Vec<usize>,
    pub feature_names: Vec<String>,
    pub standardize_mean: Vec<f64>,
    pub standardize_scale: Vec<f64>,
}

/// Median with the mean-of-middles convention for even counts.
pub(crate) fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Most frequent category; ties go to the lexicographically smallest.
fn mode(cells: &[Option<String>]) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in cells.iter().flatten() {
        *counts.entry(c.as_str()).or_default() += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (cat, n) in counts {
        if best.is_none_or(|(_, b)| n > b) {
            best = Some((cat, n));
        }
    }
    best.map(|(c, _)| c.to_owned())
}

/// Fits a plan on `table`. The key column, if any, should already be removed.
pub fn fit_plan(table: &Table, threshold: f64) -> Result<PreprocessPlan> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidConfig(format!(
            "missingness threshold {threshold} outside [0, 1]"
        )));
    }
    let n = table.row_count();
    if n == 0 {
        return Err(Error::NoValidRows);
    }
    let mut plan = PreprocessPlan {
        missingness_threshold: threshold,
        kept_columns: Vec::new(),
        numeric_medians: BTreeMap::new(),
        categorical_modes: BTreeMap::new(),
        onehot_vocab: BTreeMap::new(),
        encoded_names: Vec::new(),
        kept_encoded: Vec::new(),
        feature_names: Vec::new(),
        standardize_mean: Vec::new(),
        standardize_scale: Vec::new(),
    };

    for col in table.columns() {
        let missing = col.data.missing_count() as f64 / n as f64;
        if missing > threshold {
            continue;
        }
        plan.kept_columns.push(col.name.clone());
        match &col.data {
            ColumnData::Numeric(cells) => {
                let mut observed: Vec<f64> = cells.iter().flatten().copied().collect();
                plan.numeric_medians
                    .insert(col.name.clone(), median(&mut observed).unwrap_or(0.0));
                plan.encoded_names.push(col.name.clone());
            }
            ColumnData::Categorical(cells) => {
                let mut vocab: Vec<String> = cells.iter().flatten().cloned().collect();
                vocab.sort();
                vocab.dedup();
                if let Some(m) = mode(cells) {
                    plan.categorical_modes.insert(col.name.clone(), m);
                }
                plan.encoded_names
                    .extend(vocab.iter().map(|v| format!("{}_{}", col.name, v)));
                plan.onehot_vocab.insert(col.name.clone(), vocab);
            }
        }
    }
    if plan.kept_columns.is_empty() {
        return Err(Error::AllColumnsDropped { threshold });
    }

    let encoded = plan.encode(table)?;
    for (j, column) in encoded.axis_iter(Axis(1)).enumerate() {
        let first = column[0];
        if column.iter().any(|&v| v != first) {
            plan.kept_encoded.push(j);
        }
    }
    if plan.kept_encoded.is_empty() {
        return Err(Error::AllColumnsDropped { threshold });
    }
    plan.feature_names = plan
        .kept_encoded
        .iter()
        .map(|&j| plan.encoded_names[j].clone())
        .collect();
    for &j in &plan.kept_encoded {
        let column = encoded.column(j);
        let mean = column.sum() / n as f64;
        let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        plan.standardize_mean.push(mean);
        plan.standardize_scale.push(if std > 0.0 { std } else { 1.0 });
    }
    Ok(plan)
}

impl PreprocessPlan {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Imputes and one-hot encodes every kept column (no pruning).
    fn encode(&self, table: &Table) -> Result<Array2<f64>> {
        let n = table.row_count();
        let mut out = Array2::zeros((n, self.encoded_names.len()));
        let mut j = 0;
        for name in &self.kept_columns {
            let col = table
                .column(name)
                .ok_or_else(|| Error::SchemaMismatch(name.clone()))?;
            match (&col.data, self.onehot_vocab.get(name)) {
                (ColumnData::Numeric(cells), None) => {
                    let fill = self.numeric_medians[name];
                    for (i, c) in cells.iter().enumerate() {
                        out[[i, j]] = c.unwrap_or(fill);
                    }
                    j += 1;
                }
                (ColumnData::Categorical(cells), Some(vocab)) => {
                    let fill = self.categorical_modes.get(name);
                    for (i, c) in cells.iter().enumerate() {
                        let value = c.as_ref().or(fill);
                        if let Some(pos) = value.and_then(|v| vocab.binary_search(v).ok()) {
                            out[[i, j + pos]] = 1.0;
                        }
                    }
                    j += vocab.len();
                }
                _ => return Err(Error::SchemaMismatch(name.clone())),
            }
        }
        Ok(out)
    }

    /// Encoded (and optionally standardized) feature matrix for `table`.
    pub fn transform(&self, table: &Table, standardize: bool) -> Result<Array2<f64>> {
        let encoded = self.encode(table)?;
        let mut out = encoded.select(Axis(1), &self.kept_encoded);
        if standardize {
            for (j, mut column) in out.axis_iter_mut(Axis(1)).enumerate() {
                let (m, s) = (self.standardize_mean[j], self.standardize_scale[j]);
                column.mapv_inplace(|v| (v - m) / s);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, table: &Table, labels: &[bool], standardize: bool) -> Result<DesignMatrix> {
        if table.row_count() != labels.len() {
            return Err(Error::LengthMismatch {
                left: table.row_count(),
                right: labels.len(),
            });
        }
        let values = self.transform(table, standardize)?;
        DesignMatrix::new(values, labels.to_vec(), self.feature_names.clone())
    }
}

pub fn apply_plan(
    plan: &PreprocessPlan,
    table: &Table,
    labels: &[bool],
    standardize: bool,
) -> Result<DesignMatrix> {
    plan.apply(table, labels, standardize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Column;

    fn cat(values: &[Option<&str>]) -> Vec<Option<String>> {
        values.iter().map(|v| v.map(str::to_owned)).collect()
    }

    #[test]
    fn drops_mostly_missing_column() {
        let mut cells = vec![None; 6];
        cells.extend([Some(1.0), Some(2.0), Some(3.0), Some(4.0)]);
        let t = Table::new(
            "t",
            vec![
                Column::numeric("sparse", cells),
                Column::numeric("dense", (0..10).map(|i| Some(i as f64)).collect()),
            ],
        )
        .unwrap();
        let plan = fit_plan(&t, 0.5).unwrap();
        assert_eq!(plan.kept_columns, ["dense"]);
    }

    #[test]
    fn exactly_half_missing_is_kept() {
        let t = Table::new(
            "t",
            vec![Column::numeric("a", vec![None, Some(1.0), None, Some(3.0)])],
        )
        .unwrap();
        assert_eq!(fit_plan(&t, 0.5).unwrap().kept_columns, ["a"]);
    }

    #[test]
    fn median_of_observed() {
        let t = Table::new("t", vec![Column::numeric("a", vec![Some(1.0), None, Some(3.0)])]).unwrap();
        let plan = fit_plan(&t, 1.0).unwrap();
        assert_eq!(plan.numeric_medians["a"], 2.0);
        let x = plan.transform(&t, false).unwrap();
        assert_eq!(x.column(0).to_vec(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(median(&mut [5.0, 1.0, 3.0]), Some(3.0));
        assert_eq!(median(&mut []), None);
    }

    #[test]
    fn mode_tie_is_lexicographic() {
        assert_eq!(mode(&cat(&[Some("b"), Some("a"), None])), Some("a".into()));
        assert_eq!(mode(&cat(&[Some("b"), Some("b"), Some("a")])), Some("b".into()));
    }

    #[test]
    fn constant_category_is_pruned() {
        let t = Table::new(
            "t",
            vec![
                Column::categorical("c", cat(&[Some("A"), Some("A"), None])),
                Column::numeric("x", vec![Some(0.0), Some(1.0), Some(2.0)]),
            ],
        )
        .unwrap();
        let plan = fit_plan(&t, 0.5).unwrap();
        assert_eq!(plan.encoded_names, ["c_A", "x"]);
        assert_eq!(plan.feature_names, ["x"]);
    }

    #[test]
    fn standardizes_to_unit_scale() {
        let t = Table::new("t", vec![Column::numeric("a", vec![Some(0.0), Some(2.0)])]).unwrap();
        let plan = fit_plan(&t, 0.5).unwrap();
        let x = plan.transform(&t, true).unwrap();
        assert_eq!(x.column(0).to_vec(), [-1.0, 1.0]);
    }

    #[test]
    fn unseen_category_encodes_to_zeros() {
        let train = Table::new("t", vec![Column::categorical("c", cat(&[Some("A"), Some("B")]))]).unwrap();
        let plan = fit_plan(&train, 0.5).unwrap();
        let test = Table::new("t", vec![Column::categorical("c", cat(&[Some("C")]))]).unwrap();
        let x = plan.transform(&test, false).unwrap();
        assert_eq!(x.row(0).to_vec(), [0.0, 0.0]);
    }

    #[test]
    fn missing_kept_column_is_schema_mismatch() {
        let train = Table::new("t", vec![Column::numeric("a", vec![Some(0.0), Some(1.0)])]).unwrap();
        let plan = fit_plan(&train, 0.5).unwrap();
        let other = Table::new("t", vec![Column::numeric("b", vec![Some(0.0)])]).unwrap();
        assert!(matches!(plan.transform(&other, true), Err(Error::SchemaMismatch(_))));
        let wrong_kind = Table::new("t", vec![Column::categorical("a", cat(&[Some("x")]))]).unwrap();
        assert!(matches!(plan.transform(&wrong_kind, true), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn all_dropped() {
        let t = Table::new("t", vec![Column::numeric("a", vec![None, None, Some(1.0)])]).unwrap();
        assert!(matches!(fit_plan(&t, 0.5), Err(Error::AllColumnsDropped { .. })));
    }
}
