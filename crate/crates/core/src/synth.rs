//! Seeded synthetic data with known informative features.
//!
//! Features are standard normal. The label follows a logistic model over a
//! random subset of informative features with random signs, and an
//! intercept found by bisection so that the mean success probability over
//! the drawn sample hits `positive_rate_target`.

use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Column, LabelRule, Table};
use crate::linear::sigmoid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_informative: usize,
    pub coefficient_scale: f64,
    /// Standard deviation of Gaussian noise added to each logit.
    pub noise_std: f64,
    pub missing_fraction: f64,
    /// Share of features turned into low/mid/high categoricals.
    pub categorical_fraction: f64,
    pub positive_rate_target: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_samples: 1000,
            n_features: 200,
            n_informative: 10,
            coefficient_scale: 1.0,
            noise_std: 0.0,
            missing_fraction: 0.0,
            categorical_fraction: 0.0,
            positive_rate_target: 0.3,
            seed: 42,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n_samples == 0 || self.n_features == 0 || self.n_informative == 0 {
            return bad("n_samples, n_features and n_informative must be positive".into());
        }
        if self.n_informative > self.n_features {
            return bad(format!("n_informative {} > n_features {}", self.n_informative, self.n_features));
        }
        if !(self.coefficient_scale >= 0.0 && self.coefficient_scale.is_finite()) {
            return bad("coefficient_scale must be finite and non-negative".into());
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return bad("noise_std must be finite and non-negative".into());
        }
        if !(0.0..1.0).contains(&self.missing_fraction) {
            return bad(format!("missing_fraction {} outside [0, 1)", self.missing_fraction));
        }
        if !(0.0..=1.0).contains(&self.categorical_fraction) {
            return bad(format!("categorical_fraction {} outside [0, 1]", self.categorical_fraction));
        }
        if !(self.positive_rate_target > 0.0 && self.positive_rate_target < 1.0) {
            return bad(format!("positive_rate_target {} outside (0, 1)", self.positive_rate_target));
        }
        Ok(())
    }
}

/// Generated table plus ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    /// `SEQN` key column followed by `F0000`, `F0001`, ...
    pub table: Table,
    pub labels: Vec<bool>,
    /// Indices into the feature list (not counting the key column).
    pub informative: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl SynthData {
    pub fn feature_name(index: usize) -> String {
        format!("F{index:04}")
    }

    pub fn informative_names(&self) -> Vec<String> {
        self.informative.iter().map(|&i| Self::feature_name(i)).collect()
    }
}

/// Intercept `b` with `mean_i sigmoid(logit_i + b) = target`, by bisection.
fn calibrate_intercept(logits: &[f64], target: f64) -> f64 {
    let rate = |b: f64| logits.iter().map(|&z| sigmoid(z + b)).sum::<f64>() / logits.len() as f64;
    let (mut lo, mut hi) = (-1.0e3, 1.0e3);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rate(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let (n, p) = (spec.n_samples, spec.n_features);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut columns: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();

    let mut informative = index::sample(&mut rng, p, spec.n_informative).into_vec();
    informative.sort_unstable();
    let mut coefficients = vec![0.0; p];
    for &j in &informative {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        coefficients[j] = sign * spec.coefficient_scale;
    }

    let noise = Normal::new(0.0, spec.noise_std).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let logits: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = informative.iter().map(|&j| coefficients[j] * columns[j][i]).sum();
            signal + noise.sample(&mut rng)
        })
        .collect();
    let intercept = calibrate_intercept(&logits, spec.positive_rate_target);
    let labels: Vec<bool> = logits
        .iter()
        .map(|&z| rng.random_bool(sigmoid(z + intercept)))
        .collect();

    let n_categorical = (spec.categorical_fraction * p as f64).round() as usize;
    let mut categorical = index::sample(&mut rng, p, n_categorical).into_vec();
    categorical.sort_unstable();

    let mut out = Vec::with_capacity(p + 1);
    out.push(Column::numeric("SEQN", (1..=n).map(|i| Some(i as f64)).collect()));
    for (j, values) in columns.iter_mut().enumerate() {
        let missing: Vec<bool> = (0..n).map(|_| rng.random_bool(spec.missing_fraction)).collect();
        let name = SynthData::feature_name(j);
        if categorical.binary_search(&j).is_ok() {
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let (t1, t2) = (sorted[n / 3], sorted[(2 * n) / 3]);
            let cells = values
                .iter()
                .zip(&missing)
                .map(|(&v, &m)| {
                    (!m).then(|| {
                        if v < t1 {
                            "low"
                        } else if v < t2 {
                            "mid"
                        } else {
                            "high"
                        }
                        .to_owned()
                    })
                })
                .collect();
            out.push(Column::categorical(name, cells));
        } else {
            let cells = values.iter().zip(&missing).map(|(&v, &m)| (!m).then_some(v)).collect();
            out.push(Column::numeric(name, cells));
        }
    }

    Ok(SynthData {
        table: Table::new("synth", out)?,
        labels,
        informative,
        coefficients,
        intercept,
    })
}

/// Default component file names, in join order.
pub const COMPONENT_FILES: [&str; 5] = ["demo.csv", "exam.csv", "labs.csv", "medications.csv", "questionnaire.csv"];

/// Splits the generated table into five keyed component tables.
///
/// Feature columns are dealt out in contiguous chunks. The questionnaire
/// table also carries the self-report code (1 positive, 2 negative) and the
/// laboratory table carries glucose and HbA1c values consistent with the
/// label under both label rules; these three columns are consumed by label
/// derivation and never become features.
pub fn component_tables(data: &SynthData, rule: &LabelRule, seed: u64) -> Result<Vec<Table>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_0F_1AB5);
    let n = data.labels.len();
    let cols = data.table.columns();
    let key = cols[0].clone();
    let features = &cols[1..];
    let chunk = features.len().div_ceil(COMPONENT_FILES.len());

    let mut glucose = Vec::with_capacity(n);
    let mut hba1c = Vec::with_capacity(n);
    for &y in &data.labels {
        let (g, h) = if y && rng.random_bool(0.5) {
            (rng.random_range(rule.glucose_threshold..rule.glucose_threshold + 150.0), rng.random_range(6.5..11.0))
        } else {
            (rng.random_range(70.0..rule.glucose_threshold - 1.0), rng.random_range(4.3..rule.hba1c_threshold - 0.1))
        };
        glucose.push(Some((g * 10.0_f64).round() / 10.0));
        hba1c.push(Some((h * 10.0_f64).round() / 10.0));
    }
    let codes: Vec<Option<f64>> = data
        .labels
        .iter()
        .map(|&y| Some(if y { rule.positive_code } else { rule.negative_code }))
        .collect();

    COMPONENT_FILES
        .iter()
        .enumerate()
        .map(|(t, file)| {
            let name = file.trim_end_matches(".csv");
            let mut table_cols = vec![key.clone()];
            let lo = (t * chunk).min(features.len());
            let hi = ((t + 1) * chunk).min(features.len());
            table_cols.extend_from_slice(&features[lo..hi]);
            match name {
                "labs" => {
                    table_cols.push(Column::numeric(rule.glucose_column.clone(), glucose.clone()));
                    table_cols.push(Column::numeric(rule.hba1c_column.clone(), hba1c.clone()));
                }
                "questionnaire" => {
                    table_cols.push(Column::numeric(rule.self_report_column.clone(), codes.clone()));
                }
                _ => {}
            }
            Table::new(name, table_cols)
        })
        .collect()
}

/// Ground truth written next to the component files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SynthSpec,
    pub informative_indices: Vec<usize>,
    pub informative_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub positive_rate: f64,
}

/// Writes the five component CSVs and `ground_truth.json` into `dir`.
pub fn write_components(spec: &SynthSpec, dir: &Path) -> Result<GroundTruth> {
    let data = generate(spec)?;
    let tables = component_tables(&data, &LabelRule::default(), spec.seed)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (table, file) in tables.iter().zip(COMPONENT_FILES) {
        crate::cli::output::write_table_csv(table, &dir.join(file))?;
    }
    let truth = GroundTruth {
        spec: spec.clone(),
        informative_names: data.informative_names(),
        informative_indices: data.informative.clone(),
        coefficients: data.informative.iter().map(|&j| data.coefficients[j]).collect(),
        intercept: data.intercept,
        positive_rate: data.labels.iter().filter(|&&y| y).count() as f64 / data.labels.len() as f64,
    };
    let path = dir.join("ground_truth.json");
    let json = serde_json::to_string_pretty(&truth)?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(truth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_missing_by_default() {
        let d = generate(&SynthSpec { n_samples: 50, n_features: 10, n_informative: 3, ..Default::default() }).unwrap();
        assert!(d.table.columns().iter().all(|c| c.data.missing_count() == 0));
        assert_eq!(d.informative.len(), 3);
    }

    #[test]
    fn deterministic() {
        let spec = SynthSpec { n_samples: 80, n_features: 12, n_informative: 4, missing_fraction: 0.2, categorical_fraction: 0.25, ..Default::default() };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn positive_rate_near_target() {
        let spec = SynthSpec { n_samples: 2000, n_features: 20, n_informative: 5, positive_rate_target: 0.25, ..Default::default() };
        let d = generate(&spec).unwrap();
        let rate = d.labels.iter().filter(|&&y| y).count() as f64 / 2000.0;
        assert!((rate - 0.25).abs() < 0.05, "rate {rate}");
    }

    #[test]
    fn categorical_share() {
        let spec = SynthSpec { n_samples: 30, n_features: 10, n_informative: 2, categorical_fraction: 0.3, ..Default::default() };
        let d = generate(&spec).unwrap();
        let cats = d.table.columns().iter().filter(|c| c.as_categorical().is_some()).count();
        assert_eq!(cats, 3);
    }

    #[test]
    fn invalid_specs() {
        for spec in [
            SynthSpec { n_informative: 300, ..Default::default() },
            SynthSpec { missing_fraction: 1.0, ..Default::default() },
            SynthSpec { positive_rate_target: 0.0, ..Default::default() },
        ] {
            assert!(matches!(generate(&spec), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn calibration_hits_target() {
        let logits: Vec<f64> = (0..100).map(|i| (i as f64 - 50.0) / 10.0).collect();
        let b = calibrate_intercept(&logits, 0.2);
        let rate = logits.iter().map(|&z| sigmoid(z + b)).sum::<f64>() / 100.0;
        assert!((rate - 0.2).abs() < 1e-9);
    }
}
