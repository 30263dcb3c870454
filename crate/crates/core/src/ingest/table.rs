use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// Cells of one column. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "cells", rename_all = "lowercase")]
pub enum ColumnData {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(c) => c.len(),
            ColumnData::Categorical(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            ColumnData::Numeric(c) => c[row].is_none(),
            ColumnData::Categorical(c) => c[row].is_none(),
        }
    }

    pub fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_missing(i)).count()
    }

    pub(crate) fn take(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(c) => ColumnData::Numeric(rows.iter().map(|&r| c[r]).collect()),
            ColumnData::Categorical(c) => {
                ColumnData::Categorical(rows.iter().map(|&r| c[r].clone()).collect())
            }
        }
    }

    /// Text form of a cell, used for join keys. Numbers use Rust's shortest
    /// round-trip formatting so `7` and `7.0` compare equal.
    pub fn key_text(&self, row: usize) -> Option<String> {
        match self {
            ColumnData::Numeric(c) => c[row].map(|v| format!("{v}")),
            ColumnData::Categorical(c) => c[row].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(flatten)]
    pub data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, cells: Vec<Option<f64>>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Numeric(cells),
        }
    }

    pub fn categorical(name: impl Into<String>, cells: Vec<Option<String>>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Categorical(cells),
        }
    }

    pub fn kind(&self) -> ColumnKind {
        match self.data {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(c) => Some(c),
            ColumnData::Categorical(_) => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&[Option<String>]> {
        match &self.data {
            ColumnData::Categorical(c) => Some(c),
            ColumnData::Numeric(_) => None,
        }
    }
}

/// Column-oriented table with per-cell missingness.
///
/// Every column has `row_count` cells, names are unique and numeric cells are
/// finite. The constructor enforces all three.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    columns: Vec<Column>,
    row_count: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self> {
        let name = name.into();
        let row_count = columns.first().map_or(0, |c| c.data.len());
        let mut seen = HashSet::new();
        for col in &columns {
            if col.data.len() != row_count {
                return Err(Error::InvalidConfig(format!(
                    "table `{name}`: column `{}` has {} cells, expected {row_count}",
                    col.name,
                    col.data.len()
                )));
            }
            if !seen.insert(col.name.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "table `{name}`: duplicate column `{}`",
                    col.name
                )));
            }
            if let Some(cells) = col.as_numeric() {
                if cells.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteInput);
                }
            }
        }
        Ok(Table {
            name,
            columns,
            row_count,
        })
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// New table holding `rows` in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Table {
        Table {
            name: self.name.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    data: c.data.take(rows),
                })
                .collect(),
            row_count: rows.len(),
        }
    }

    /// First `n` rows (or all of them when the table is shorter).
    pub fn head(&self, n: usize) -> Table {
        if n >= self.row_count {
            return self.clone();
        }
        let rows: Vec<usize> = (0..n).collect();
        self.select_rows(&rows)
    }

    /// Copy without the named columns. Unknown names are ignored.
    pub fn without_columns(&self, names: &[&str]) -> Table {
        Table {
            name: self.name.clone(),
            columns: self
                .columns
                .iter()
                .filter(|c| !names.contains(&c.name.as_str()))
                .cloned()
                .collect(),
            row_count: self.row_count,
        }
    }

    pub(crate) fn into_columns(self) -> Vec<Column> {
        self.columns
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_duplicate_columns() {
        let ragged = Table::new(
            "t",
            vec![
                Column::numeric("a", vec![Some(1.0)]),
                Column::numeric("b", vec![Some(1.0), None]),
            ],
        );
        assert!(ragged.is_err());
        let dup = Table::new(
            "t",
            vec![
                Column::numeric("a", vec![Some(1.0)]),
                Column::numeric("a", vec![Some(2.0)]),
            ],
        );
        assert!(dup.is_err());
        let inf = Table::new("t", vec![Column::numeric("a", vec![Some(f64::INFINITY)])]);
        assert!(matches!(inf, Err(Error::NonFiniteInput)));
    }

    #[test]
    fn numeric_key_text_normalises_trailing_zero() {
        let c = ColumnData::Numeric(vec![Some(7.0), None]);
        assert_eq!(c.key_text(0).as_deref(), Some("7"));
        assert_eq!(c.key_text(1), None);
    }
}
