//! Loading component CSV files, joining them on the participant key,
//! row sampling and label derivation.

mod label;
mod load;
mod merge;
mod table;

pub use label::{derive_label, LabelMode, LabelRule};
pub use load::{load_csv, load_csv_with, LoadOptions};
pub use merge::{merge_on_key, pivot_indicators, subsample, SampleSpec};
pub use table::{Column, ColumnData, ColumnKind, Table};
