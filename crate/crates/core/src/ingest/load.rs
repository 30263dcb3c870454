use std::path::Path;

use serde::{Deserialize, Serialize};

use super::table::{Column, Table};
use crate::error::{Error, Result};

/// Options applied while parsing a CSV component file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadOptions {
    /// Extra cell values treated as missing in addition to the empty string.
    /// Numeric sentinels also match equal numbers (`"7777"` matches `7777.0`).
    pub missing_sentinels: Vec<String>,
    /// Keep only the first `max_rows` data rows.
    pub max_rows: Option<usize>,
}

impl LoadOptions {
    fn is_missing(&self, cell: &str) -> bool {
        if cell.is_empty() {
            return true;
        }
        let as_num = cell.parse::<f64>().ok();
        self.missing_sentinels.iter().any(|s| {
            s == cell
                || match (as_num, s.parse::<f64>()) {
                    (Some(a), Ok(b)) => a == b,
                    _ => false,
                }
        })
    }
}

/// Loads a CSV file with default options.
pub fn load_csv(path: impl AsRef<Path>, key_column: &str) -> Result<Table> {
    load_csv_with(path, key_column, &LoadOptions::default())
}

/// Loads a header-first CSV into a [`Table`] named after the file stem.
///
/// A column is numeric when every non-missing cell parses as a finite real,
/// categorical otherwise.
pub fn load_csv_with(path: impl AsRef<Path>, key_column: &str, opts: &LoadOptions) -> Result<Table> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let malformed = |reason: String| Error::MalformedCsv {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| malformed(e.to_string()))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if !headers.iter().any(|h| h == key_column) {
        return Err(Error::MissingKeyColumn {
            table: name,
            key: key_column.to_owned(),
        });
    }

    let mut raw: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
    for (i, record) in reader.records().enumerate() {
        if opts.max_rows.is_some_and(|m| i >= m) {
            break;
        }
        let record = record.map_err(|e| malformed(e.to_string()))?;
        for (j, cell) in record.iter().enumerate() {
            raw[j].push((!opts.is_missing(cell)).then(|| cell.to_owned()));
        }
    }

    let columns = headers
        .into_iter()
        .zip(raw)
        .map(|(h, cells)| infer_column(h, cells))
        .collect();
    Table::new(name, columns).map_err(|e| match e {
        Error::InvalidConfig(reason) => malformed(reason),
        other => other,
    })
}

fn infer_column(name: String, cells: Vec<Option<String>>) -> Column {
    let parsed: Option<Vec<Option<f64>>> = cells
        .iter()
        .map(|c| match c {
            None => Some(None),
            Some(s) => s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Some),
        })
        .collect();
    match parsed {
        Some(values) => Column::numeric(name, values),
        None => Column::categorical(name, cells),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ColumnKind;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_numeric_with_missing() {
        let f = write("SEQN,BMXBMI\n1,22.5\n2,\n");
        let t = load_csv(f.path(), "SEQN").unwrap();
        assert_eq!(t.row_count(), 2);
        let bmi = t.column("BMXBMI").unwrap();
        assert_eq!(bmi.kind(), ColumnKind::Numeric);
        assert_eq!(bmi.as_numeric().unwrap(), &[Some(22.5), None]);
    }

    #[test]
    fn mixed_column_is_categorical() {
        let f = write("SEQN,A\n1,1\n2,x\n");
        let t = load_csv(f.path(), "SEQN").unwrap();
        assert_eq!(t.column("A").unwrap().kind(), ColumnKind::Categorical);
    }

    #[test]
    fn ragged_row_is_malformed() {
        let f = write("SEQN,A\n1,2,3\n");
        assert!(matches!(
            load_csv(f.path(), "SEQN"),
            Err(Error::MalformedCsv { .. })
        ));
    }

    #[test]
    fn missing_key_and_missing_file() {
        let f = write("ID,A\n1,2\n");
        assert!(matches!(
            load_csv(f.path(), "SEQN"),
            Err(Error::MissingKeyColumn { .. })
        ));
        assert!(matches!(
            load_csv("/nonexistent/demo.csv", "SEQN"),
            Err(Error::FileNotFound(_))
        ));
    }

    #[test]
    fn sentinels_and_truncation() {
        let f = write("SEQN,A\n1,7777\n2,3\n3,9\n");
        let opts = LoadOptions {
            missing_sentinels: vec!["7777.0".into()],
            max_rows: Some(2),
        };
        let t = load_csv_with(f.path(), "SEQN", &opts).unwrap();
        assert_eq!(t.row_count(), 2);
        assert_eq!(t.column("A").unwrap().as_numeric().unwrap(), &[None, Some(3.0)]);
    }
}
