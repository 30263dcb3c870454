use serde::{Deserialize, Serialize};

use super::table::{Column, ColumnData, Table};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Self-reported diagnosis only; rows without a valid code are dropped.
    Prototype,
    /// Self-report OR fasting glucose OR HbA1c above threshold.
    Refined,
}

/// How the binary diabetes outcome is derived from the merged table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelRule {
    pub mode: LabelMode,
    /// mg/dL
    pub glucose_threshold: f64,
    /// percent
    pub hba1c_threshold: f64,
    pub self_report_column: String,
    pub glucose_column: String,
    pub hba1c_column: String,
    pub positive_code: f64,
    pub negative_code: f64,
}

impl Default for LabelRule {
    fn default() -> Self {
        LabelRule {
            mode: LabelMode::Refined,
            glucose_threshold: 126.0,
            hba1c_threshold: 6.5,
            self_report_column: "DIQ010".into(),
            glucose_column: "LBXGLU".into(),
            hba1c_column: "LBXGH".into(),
            positive_code: 1.0,
            negative_code: 2.0,
        }
    }
}

impl LabelRule {
    pub fn prototype() -> Self {
        LabelRule {
            mode: LabelMode::Prototype,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.glucose_threshold > 0.0 && self.hba1c_threshold > 0.0) {
            return Err(Error::InvalidConfig("label thresholds must be positive".into()));
        }
        Ok(())
    }

    /// Columns consumed by the active mode. They never reach the feature table.
    pub fn source_columns(&self) -> Vec<&str> {
        match self.mode {
            LabelMode::Prototype => vec![self.self_report_column.as_str()],
            LabelMode::Refined => vec![
                self.self_report_column.as_str(),
                self.glucose_column.as_str(),
                self.hba1c_column.as_str(),
            ],
        }
    }
}

fn numeric_cells(table: &Table, name: &str) -> Result<Vec<Option<f64>>> {
    let col: &Column = table
        .column(name)
        .ok_or_else(|| Error::MissingLabelColumn(name.to_owned()))?;
    Ok(match &col.data {
        ColumnData::Numeric(c) => c.clone(),
        ColumnData::Categorical(c) => c
            .iter()
            .map(|s| s.as_deref().and_then(|s| s.parse::<f64>().ok()))
            .collect(),
    })
}

/// Derives the binary label and returns the feature table with every
/// label-source column removed.
pub fn derive_label(table: &Table, rule: &LabelRule) -> Result<(Table, Vec<bool>)> {
    rule.validate()?;
    let report = numeric_cells(table, &rule.self_report_column)?;
    let valid_code = |v: Option<f64>| v == Some(rule.positive_code) || v == Some(rule.negative_code);

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    match rule.mode {
        LabelMode::Prototype => {
            for (row, &code) in report.iter().enumerate() {
                if valid_code(code) {
                    rows.push(row);
                    labels.push(code == Some(rule.positive_code));
                }
            }
        }
        LabelMode::Refined => {
            let glucose = numeric_cells(table, &rule.glucose_column)?;
            let hba1c = numeric_cells(table, &rule.hba1c_column)?;
            for row in 0..table.row_count() {
                let (g, h, code) = (glucose[row], hba1c[row], report[row]);
                if g.is_none() && h.is_none() && !valid_code(code) {
                    continue;
                }
                let positive = code == Some(rule.positive_code)
                    || g.is_some_and(|g| g >= rule.glucose_threshold)
                    || h.is_some_and(|h| h >= rule.hba1c_threshold);
                rows.push(row);
                labels.push(positive);
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::NoValidRows);
    }
    let features = table.without_columns(&rule.source_columns()).select_rows(&rows);
    Ok((features, labels))
}
