//! Report writers. Every CSV uses `.` decimals and six significant digits.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{ColumnData, Table};

/// Formats like C's `%.6g`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let io = |e: csv::Error| Error::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Writes a table as CSV; missing cells become empty fields.
pub fn write_table_csv(table: &Table, path: &Path) -> Result<()> {
    let header: Vec<&str> = table.column_names().collect();
    let rows = (0..table.row_count()).map(|r| {
        table
            .columns()
            .iter()
            .map(|c| match &c.data {
                ColumnData::Numeric(v) => v[r].map(fmt_sig).unwrap_or_default(),
                ColumnData::Categorical(v) => v[r].clone().unwrap_or_default(),
            })
            .collect()
    });
    write_csv(path, &header, rows)
}

#[cfg(test)]
mod tests {
    use super::fmt_sig;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.98661234), "0.986612");
        assert_eq!(fmt_sig(123456789.0), "1.23457e8");
        assert_eq!(fmt_sig(-0.000012345678), "-1.23457e-5");
        assert_eq!(fmt_sig(0.00012345678), "0.000123457");
        assert_eq!(fmt_sig(999999.7), "1e6");
        assert_eq!(fmt_sig(2.5), "2.5");
        assert_eq!(fmt_sig(1657.0), "1657");
    }
}
