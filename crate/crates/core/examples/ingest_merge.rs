//! Load keyed component tables, pivot a long-format medication table into
//! indicator columns, join everything on the key and derive labels.

use hdlss_hybrid::ingest::{derive_label, load_csv, merge_on_key, pivot_indicators, LabelRule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let write = |name: &str, body: &str| std::fs::write(dir.path().join(name), body).unwrap();
    write("demo.csv", "SEQN,RIDAGEYR,RIAGENDR\n1,54,M\n2,37,F\n3,61,F\n4,45,M\n");
    write("labs.csv", "SEQN,LBXGLU,LBXGH\n1,131,6.9\n2,92,5.1\n3,,6.7\n4,99,\n");
    write("questionnaire.csv", "SEQN,DIQ010\n1,2\n2,2\n3,2\n4,9\n");
    write("medications.csv", "SEQN,RXDDRUG\n1,METFORMIN\n1,LISINOPRIL\n3,METFORMIN\n");

    let demo = load_csv(dir.path().join("demo.csv"), "SEQN")?;
    let labs = load_csv(dir.path().join("labs.csv"), "SEQN")?;
    let quest = load_csv(dir.path().join("questionnaire.csv"), "SEQN")?;
    let meds = pivot_indicators(&load_csv(dir.path().join("medications.csv"), "SEQN")?, "SEQN", "RXDDRUG", "RXDRUG")?;
    println!("medication indicators: {:?}", meds.column_names().collect::<Vec<_>>());

    // inner join: participant 2 and 4 have no medication rows
    let merged = merge_on_key(&[demo, labs, quest, meds], "SEQN")?;
    println!("merged {} rows x {} columns", merged.row_count(), merged.columns().len());

    let (features, labels) = derive_label(&merged, &LabelRule::default())?;
    println!("labels {labels:?}");
    println!("feature columns {:?}", features.column_names().collect::<Vec<_>>());
    Ok(())
}
