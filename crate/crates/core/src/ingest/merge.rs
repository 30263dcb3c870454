use std::collections::{BTreeSet, HashMap};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::table::{Column, ColumnData, Table};
use crate::error::{Error, Result};

/// Row index of the first occurrence of every non-missing key.
fn key_index(table: &Table, key_column: &str) -> Result<(HashMap<String, usize>, Vec<String>)> {
    let col = table.column(key_column).ok_or_else(|| Error::MissingKeyColumn {
        table: table.name.clone(),
        key: key_column.to_owned(),
    })?;
    let mut first = HashMap::new();
    let mut order = Vec::new();
    for row in 0..table.row_count() {
        if let Some(k) = col.data.key_text(row) {
            if !first.contains_key(&k) {
                first.insert(k.clone(), row);
                order.push(k);
            }
        }
    }
    Ok((first, order))
}

/// Inner join of `tables` on `key_column`.
///
/// Duplicate keys inside one table keep their first occurrence. Rows follow
/// the key order of the first table. A non-key column name defined by more
/// than one table is suffixed with `.<table name>` in every table that
/// defines it.
pub fn merge_on_key(tables: &[Table], key_column: &str) -> Result<Table> {
    let indexed = tables
        .iter()
        .map(|t| key_index(t, key_column))
        .collect::<Result<Vec<_>>>()?;
    let Some((_, first_order)) = indexed.first() else {
        return Err(Error::EmptyIntersection);
    };
    let keys: Vec<&String> = first_order
        .iter()
        .filter(|k| indexed.iter().all(|(idx, _)| idx.contains_key(*k)))
        .collect();
    if keys.is_empty() {
        return Err(Error::EmptyIntersection);
    }

    let mut defined_by: HashMap<&str, usize> = HashMap::new();
    for t in tables {
        for name in t.column_names().filter(|n| *n != key_column) {
            *defined_by.entry(name).or_default() += 1;
        }
    }

    let first_rows: Vec<usize> = keys.iter().map(|k| indexed[0].0[*k]).collect();
    let key_col = tables[0].column(key_column).expect("checked by key_index");
    let mut columns = vec![Column {
        name: key_column.to_owned(),
        data: key_col.data.take(&first_rows),
    }];

    for (t, (idx, _)) in tables.iter().zip(&indexed) {
        let rows: Vec<usize> = keys.iter().map(|k| idx[*k]).collect();
        let picked = t.select_rows(&rows);
        for col in picked.into_columns() {
            if col.name == key_column {
                continue;
            }
            let name = if defined_by[col.name.as_str()] > 1 {
                format!("{}.{}", col.name, t.name)
            } else {
                col.name
            };
            columns.push(Column {
                name,
                data: col.data,
            });
        }
    }
    Table::new("merged", columns)
}

/// Collapses a long table (several rows per key) into one row per key,
/// turning the values of `column` into 0/1 indicator columns named
/// `<prefix><value>`. Remaining columns keep the key's first occurrence.
pub fn pivot_indicators(table: &Table, key_column: &str, column: &str, prefix: &str) -> Result<Table> {
    let (first, order) = key_index(table, key_column)?;
    let source = table
        .column(column)
        .ok_or_else(|| Error::SchemaMismatch(column.to_owned()))?;
    let key_col = table.column(key_column).unwrap();

    let mut present: HashMap<&str, BTreeSet<String>> = HashMap::new();
    let mut vocab = BTreeSet::new();
    let key_texts: Vec<Option<String>> = (0..table.row_count()).map(|r| key_col.data.key_text(r)).collect();
    for (row, key) in key_texts.iter().enumerate() {
        let (Some(key), Some(value)) = (key, source.data.key_text(row)) else {
            continue;
        };
        vocab.insert(value.clone());
        present.entry(key.as_str()).or_default().insert(value);
    }

    let rows: Vec<usize> = order.iter().map(|k| first[k]).collect();
    let base = table.without_columns(&[column]).select_rows(&rows);
    let mut columns = base.into_columns();
    for value in &vocab {
        let cells = order
            .iter()
            .map(|k| {
                let hit = present.get(k.as_str()).is_some_and(|s| s.contains(value));
                Some(if hit { 1.0 } else { 0.0 })
            })
            .collect();
        columns.push(Column {
            name: format!("{prefix}{value}"),
            data: ColumnData::Numeric(cells),
        });
    }
    Table::new(table.name.clone(), columns)
}

/// Row truncation and subsampling applied while loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleSpec {
    /// Truncate each component table to its first rows before merging.
    pub max_rows_per_table: Option<usize>,
    /// Fraction of merged rows kept, in (0, 1].
    pub keep_fraction: f64,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            max_rows_per_table: None,
            keep_fraction: 1.0,
            seed: 42,
        }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "keep_fraction {} outside (0, 1]",
                self.keep_fraction
            )));
        }
        if self.max_rows_per_table == Some(0) {
            return Err(Error::InvalidConfig("max_rows_per_table must be positive".into()));
        }
        Ok(())
    }
}

/// Keeps `floor(keep_fraction * rows)` rows drawn uniformly without
/// replacement. Retained rows stay in their original order.
pub fn subsample(table: &Table, spec: &SampleSpec) -> Result<Table> {
    spec.validate()?;
    if spec.keep_fraction == 1.0 {
        return Ok(table.clone());
    }
    let n = table.row_count();
    let keep = (spec.keep_fraction * n as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = index::sample(&mut rng, n, keep).into_vec();
    rows.sort_unstable();
    Ok(table.select_rows(&rows))
}
