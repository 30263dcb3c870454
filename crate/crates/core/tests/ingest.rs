use std::collections::BTreeMap;
use std::io::Write;

use hdlss_hybrid::ingest::{
    derive_label, load_csv, merge_on_key, subsample, Column, ColumnData, LabelRule, SampleSpec, Table,
};
use proptest::prelude::*;

fn keyed_table(name: &str, keys: &[u32], cols: &[&str], salt: f64) -> Table {
    let mut columns = vec![Column::numeric("SEQN", keys.iter().map(|&k| Some(k as f64)).collect())];
    for (c, col) in cols.iter().enumerate() {
        columns.push(Column::numeric(
            *col,
            keys.iter().map(|&k| Some(k as f64 * 1.5 + c as f64 + salt)).collect(),
        ));
    }
    Table::new(name, columns).unwrap()
}

/// key -> (column -> cell text), independent of row and column order.
fn cells_by_key(t: &Table) -> BTreeMap<String, BTreeMap<String, String>> {
    let key = t.column("SEQN").unwrap();
    (0..t.row_count())
        .map(|r| {
            let row = t
                .columns()
                .iter()
                .map(|c| (c.name.clone(), c.data.key_text(r).unwrap_or_default()))
                .collect();
            (key.data.key_text(r).unwrap(), row)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_is_order_independent(
        a in prop::collection::btree_set(0u32..40, 1..30),
        b in prop::collection::btree_set(0u32..40, 1..30),
        c in prop::collection::btree_set(0u32..40, 1..30),
        perm in 0usize..6,
    ) {
        let t = [
            keyed_table("demo", &a.iter().copied().collect::<Vec<_>>(), &["AGE", "SEX"], 0.0),
            keyed_table("exam", &b.iter().copied().collect::<Vec<_>>(), &["BMI", "AGE"], 0.25),
            keyed_table("labs", &c.iter().copied().collect::<Vec<_>>(), &["LBXGLU"], 0.5),
        ];
        let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
        let permuted: Vec<Table> = order.iter().map(|&i| t[i].clone()).collect();
        let base = merge_on_key(&t, "SEQN");
        let other = merge_on_key(&permuted, "SEQN");
        match (base, other) {
            (Ok(x), Ok(y)) => prop_assert_eq!(cells_by_key(&x), cells_by_key(&y)),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "one order failed, the other did not"),
        }
    }

    #[test]
    fn subsample_is_pure(n in 1usize..200, frac in 0.01..1.0f64, seed in any::<u64>()) {
        let keys: Vec<u32> = (0..n as u32).collect();
        let t = keyed_table("t", &keys, &["A"], 0.0);
        let spec = SampleSpec { max_rows_per_table: None, keep_fraction: frac, seed };
        let a = subsample(&t, &spec).unwrap();
        let b = subsample(&t, &spec).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.row_count(), (frac * n as f64).floor() as usize);
    }

    #[test]
    fn raising_glucose_never_unlabels(
        rows in prop::collection::vec((prop::option::of(60.0..200.0f64), prop::option::of(4.0..9.0f64), prop::option::of(prop_oneof![Just(1.0), Just(2.0), Just(9.0)])), 1..40),
        bump in 0.0..100.0f64,
    ) {
        let build = |extra: f64| {
            Table::new("m", vec![
                Column::numeric("SEQN", (0..rows.len()).map(|i| Some(i as f64)).collect()),
                Column::numeric("LBXGLU", rows.iter().map(|r| r.0.map(|g| g + extra)).collect()),
                Column::numeric("LBXGH", rows.iter().map(|r| r.1).collect()),
                Column::numeric("DIQ010", rows.iter().map(|r| r.2).collect()),
                Column::numeric("BMI", rows.iter().map(|_| Some(25.0)).collect()),
            ]).unwrap()
        };
        let rule = LabelRule::default();
        if let (Ok((fa, ya)), Ok((fb, yb))) = (derive_label(&build(0.0), &rule), derive_label(&build(bump), &rule)) {
            prop_assert_eq!(fa.row_count(), fb.row_count());
            for (a, b) in ya.iter().zip(&yb) {
                prop_assert!(!a || *b);
            }
            for name in rule.source_columns() {
                prop_assert!(fa.column(name).is_none());
            }
        }
    }
}

#[test]
fn refined_rule_examples() {
    let t = Table::new(
        "m",
        vec![
            Column::numeric("SEQN", vec![Some(1.0), Some(2.0), Some(3.0)]),
            Column::numeric("LBXGLU", vec![Some(130.0), Some(100.0), None]),
            Column::numeric("LBXGH", vec![None, Some(5.0), None]),
            Column::numeric("DIQ010", vec![Some(2.0), Some(2.0), Some(9.0)]),
        ],
    )
    .unwrap();
    let (features, labels) = derive_label(&t, &LabelRule::default()).unwrap();
    assert_eq!(labels, [true, false]);
    assert_eq!(features.column_names().collect::<Vec<_>>(), ["SEQN"]);
}

#[test]
fn prototype_rule_drops_refused() {
    let t = Table::new(
        "m",
        vec![
            Column::numeric("SEQN", vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)]),
            Column::numeric("DIQ010", vec![Some(1.0), Some(9.0), Some(2.0), None]),
            Column::numeric("LBXGLU", vec![Some(90.0), Some(300.0), Some(300.0), Some(90.0)]),
        ],
    )
    .unwrap();
    let (features, labels) = derive_label(&t, &LabelRule::prototype()).unwrap();
    assert_eq!(labels, [true, false]);
    assert_eq!(
        features.column("SEQN").unwrap().as_numeric().unwrap(),
        &[Some(1.0), Some(3.0)]
    );
}

#[test]
fn loads_the_documented_csv() {
    let mut f = tempfile::NamedTempFile::with_suffix(".csv").unwrap();
    writeln!(f, "SEQN,BMXBMI,RIAGENDR\n1,22.5,M\n2,,F").unwrap();
    let t = load_csv(f.path(), "SEQN").unwrap();
    assert_eq!(t.row_count(), 2);
    match &t.column("BMXBMI").unwrap().data {
        ColumnData::Numeric(v) => assert_eq!(v, &[Some(22.5), None]),
        other => panic!("expected numeric, got {other:?}"),
    }
    assert!(matches!(t.column("RIAGENDR").unwrap().data, ColumnData::Categorical(_)));
}
