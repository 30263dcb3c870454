use hdlss_hybrid::ingest::{Column, ColumnData, Table};
use hdlss_hybrid::preprocess::{fit_plan, PreprocessPlan};
use hdlss_hybrid::synth::{generate, SynthSpec};
use proptest::prelude::*;

fn mixed_spec(seed: u64) -> SynthSpec {
    SynthSpec {
        n_samples: 80,
        n_features: 25,
        n_informative: 4,
        missing_fraction: 0.2,
        categorical_fraction: 0.3,
        seed,
        ..SynthSpec::default()
    }
}

fn mixed_table(seed: u64) -> Table {
    generate(&mixed_spec(seed)).unwrap().table.without_columns(&["SEQN"])
}

/// Overwrites every cell of `rows` with junk of the right type.
fn scramble_rows(t: &Table, rows: &[usize]) -> Table {
    let columns = t
        .columns()
        .iter()
        .map(|c| match &c.data {
            ColumnData::Numeric(v) => {
                let mut v = v.clone();
                for &r in rows {
                    v[r] = if r % 3 == 0 { None } else { Some(1e6 + r as f64) };
                }
                Column::numeric(c.name.clone(), v)
            }
            ColumnData::Categorical(v) => {
                let mut v = v.clone();
                for &r in rows {
                    v[r] = Some(format!("unseen{r}"));
                }
                Column::categorical(c.name.clone(), v)
            }
        })
        .collect();
    Table::new("scrambled", columns).unwrap()
}

fn split(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    (0..n).partition(|&i| !(i as u64 + seed).is_multiple_of(4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plan_ignores_test_rows(seed in 0u64..1000) {
        let t = mixed_table(seed);
        let (train, test) = split(t.row_count(), seed);
        let plan = fit_plan(&t.select_rows(&train), 0.5).unwrap();
        let other = fit_plan(&scramble_rows(&t, &test).select_rows(&train), 0.5).unwrap();
        prop_assert_eq!(&plan, &other);
        // transforming the test rows also leaves the plan alone
        let _ = plan.transform(&scramble_rows(&t, &test).select_rows(&test), true).unwrap();
        prop_assert_eq!(&plan, &other);
    }

    #[test]
    fn training_columns_are_standardized(seed in 0u64..1000) {
        let t = mixed_table(seed);
        let plan = fit_plan(&t, 0.5).unwrap();
        let x = plan.transform(&t, true).unwrap();
        let n = x.nrows() as f64;
        for (j, col) in x.columns().into_iter().enumerate() {
            let mean = col.sum() / n;
            let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            prop_assert!(mean.abs() < 1e-9, "column {j} mean {mean}");
            prop_assert!((std - 1.0).abs() < 1e-9, "column {j} std {std}");
        }
    }

    #[test]
    fn every_table_gets_the_same_width_and_no_nan(seed in 0u64..1000) {
        let t = mixed_table(seed);
        let (train, test) = split(t.row_count(), seed);
        let plan = fit_plan(&t.select_rows(&train), 0.5).unwrap();
        // unseen categories, missing cells and extreme values
        let unseen = scramble_rows(&t, &test).select_rows(&test);
        let x = plan.transform(&unseen, true).unwrap();
        prop_assert_eq!(x.ncols(), plan.n_features());
        prop_assert_eq!(x.nrows(), unseen.row_count());
        prop_assert!(x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn standardization_inverts(seed in 0u64..1000) {
        let t = mixed_table(seed);
        let plan = fit_plan(&t, 0.5).unwrap();
        let raw = plan.transform(&t, false).unwrap();
        let z = plan.transform(&t, true).unwrap();
        for ((i, j), &v) in z.indexed_iter() {
            let back = v * plan.standardize_scale[j] + plan.standardize_mean[j];
            prop_assert!((back - raw[[i, j]]).abs() <= 1e-9 * raw[[i, j]].abs().max(1.0));
        }
    }
}

#[test]
fn imputation_uses_training_median_and_mode() {
    let t = Table::new(
        "t",
        vec![
            Column::numeric("a", vec![Some(1.0), Some(10.0), None, Some(4.0), Some(3.0)]),
            Column::categorical(
                "c",
                ["x", "y", "y", "x", "y"].iter().map(|s| Some(s.to_string())).collect(),
            ),
        ],
    )
    .unwrap();
    let plan = fit_plan(&t, 0.5).unwrap();
    assert_eq!(plan.numeric_medians["a"], 3.5);
    assert_eq!(plan.categorical_modes["c"], "y");
    assert_eq!(plan.feature_names, ["a", "c_x", "c_y"]);

    let fresh = Table::new(
        "u",
        vec![
            Column::numeric("a", vec![None]),
            Column::categorical("c", vec![None]),
        ],
    )
    .unwrap();
    let raw = plan.transform(&fresh, false).unwrap();
    assert_eq!(raw.row(0).to_vec(), [3.5, 0.0, 1.0]);
}

#[test]
fn plan_json_round_trips() {
    let t = mixed_table(5);
    let plan = fit_plan(&t, 0.5).unwrap();
    let back: PreprocessPlan = serde_json::from_str(&serde_json::to_string(&plan).unwrap()).unwrap();
    assert_eq!(back, plan);
    assert_eq!(back.transform(&t, true).unwrap(), plan.transform(&t, true).unwrap());
}

#[test]
fn missing_schema_column_is_an_error() {
    let t = mixed_table(1);
    let plan = fit_plan(&t, 0.5).unwrap();
    let first = plan.kept_columns[0].clone();
    assert!(plan.transform(&t.without_columns(&[first.as_str()]), true).is_err());
}
