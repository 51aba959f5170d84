//! Single-variable screening: fit every configured algorithm on one encoded
//! column at a time and report the best recall and precision across models
//! together with class-conditional statistics over the full dataset.
//!
//! Screening granularity is the *encoded column*: a categorical level
//! indicator such as `dept=B` screens as its own standalone binary variable.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classifiers::{train, AlgoId, Hyperparams};
use crate::data::{split_minority_first, Dataset, Schema, SplitPair, VariableSpec};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, Flagged};
use crate::resample::undersample;
use crate::rng::derive_seed;

/// Training preparation used inside the per-variable loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScreenResample {
    /// Undersample the combined training half to balance (default).
    Rus,
    /// Train on the unbalanced training half as-is.
    None,
}

impl std::str::FromStr for ScreenResample {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rus" => Ok(ScreenResample::Rus),
            "none" => Ok(ScreenResample::None),
            other => Err(Error::Argument(format!(
                "unknown screen resample '{other}', expected rus | none"
            ))),
        }
    }
}

/// Class-conditional means and medians of one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassStats {
    pub mean_all: f64,
    pub median_all: f64,
    pub mean_fall: f64,
    pub median_fall: f64,
    pub mean_nofall: f64,
    pub median_nofall: f64,
}

/// One screening result row.
#[derive(Debug, Clone)]
pub struct ScreeningRow {
    pub variable: String,
    pub best_recall: f64,
    /// Model that produced the best recall (may differ from the best
    /// precision model).
    pub best_recall_model: String,
    pub best_precision: f64,
    pub best_precision_model: String,
    pub correlation: f64,
    pub stats: ClassStats,
    /// Set for constant variables (correlation undefined) and for variables
    /// where no model could be evaluated.
    pub degenerate: bool,
}

impl ScreeningRow {
    /// The selection rule: recall > 0.8 and precision > 0.013, both strict.
    pub fn passes_guideline(&self) -> bool {
        self.best_recall > 0.8 && self.best_precision > 0.013
    }
}

/// Pearson correlation between a variable and the 0/1 label (point-biserial
/// form). Constant input yields 0 with the degenerate flag.
pub fn point_biserial(values: &[f64], labels: &[u8]) -> Result<Flagged> {
    if values.len() != labels.len() {
        return Err(Error::Argument(format!(
            "{} values vs {} labels",
            values.len(),
            labels.len()
        )));
    }
    if values.len() < 2 {
        return Err(Error::Argument("correlation needs at least 2 rows".into()));
    }
    let n = values.len() as f64;
    let mean_x = values.iter().sum::<f64>() / n;
    let mean_y = labels.iter().map(|&l| l as f64).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &l) in values.iter().zip(labels) {
        let dx = x - mean_x;
        let dy = l as f64 - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Ok(Flagged { value: 0.0, degenerate: true });
    }
    Ok(Flagged { value: cov / (var_x * var_y).sqrt(), degenerate: false })
}

/// Mean and median for all rows, fall rows and no-fall rows. The median of
/// an even count is the average of the two central order statistics.
pub fn class_conditional_stats(values: &[f64], labels: &[u8]) -> Result<ClassStats> {
    if values.len() != labels.len() {
        return Err(Error::Argument(format!(
            "{} values vs {} labels",
            values.len(),
            labels.len()
        )));
    }
    let fall: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(&v, _)| v)
        .collect();
    let nofall: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 0)
        .map(|(&v, _)| v)
        .collect();
    if fall.is_empty() || nofall.is_empty() {
        return Err(Error::DegenerateClass(format!(
            "class stats need both classes, got {} falls and {} no-falls",
            fall.len(),
            nofall.len()
        )));
    }
    Ok(ClassStats {
        mean_all: mean(values),
        median_all: median(values),
        mean_fall: mean(&fall),
        median_fall: median(&fall),
        mean_nofall: mean(&nofall),
        median_nofall: median(&nofall),
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Keep rows that pass the guideline, preserving input order.
pub fn guideline_filter(rows: &[ScreeningRow]) -> Vec<ScreeningRow> {
    rows.iter().filter(|r| r.passes_guideline()).cloned().collect()
}

/// Screen one encoded column: build the one-column dataset, split it
/// minority-first 90/10, prepare the training half, fit every algorithm in
/// `algos` (k-NN expands to k = 1..4), and take the best recall and best
/// precision across the fitted models. Statistics are computed over the full
/// dataset, not the split.
pub fn screen_variable(
    data: &Dataset,
    variable: &str,
    algos: &[AlgoId],
    hp: &Hyperparams,
    resample: ScreenResample,
    seed: u64,
) -> Result<ScreeningRow> {
    let j = data
        .schema()
        .column_index(variable)
        .ok_or_else(|| Error::Argument(format!("unknown variable '{variable}'")))?;

    let values = data.column(j);
    let correlation = point_biserial(&values, data.labels())?;
    let stats = class_conditional_stats(&values, data.labels())?;

    let one_col = single_column_dataset(data, j, variable)?;
    let (minority, majority) =
        split_minority_first(&one_col, 0.9, derive_seed(seed, "screen-split"))?;
    let mut train_half = Dataset::concat(&[&minority.train, &majority.train])?;
    if resample == ScreenResample::Rus {
        train_half = undersample(&train_half, derive_seed(seed, "screen-rus"))?;
    }
    let test = Dataset::concat(&[&minority.test, &majority.test])?;
    let split = SplitPair { train: train_half, test };

    let mut best_recall: Option<(f64, String)> = None;
    let mut best_precision: Option<(f64, String)> = None;
    let mut evaluated_any = false;
    for algo in expand_algos(algos, hp) {
        let model = match train(algo.0, &split.train, &algo.1, derive_seed(seed, &algo.2)) {
            Ok(m) => m,
            Err(_) => continue, // a failed model is skipped, never fatal
        };
        let record = match evaluate(&model, &split) {
            Ok(r) => r,
            Err(_) => continue,
        };
        evaluated_any = true;
        let id = model.short_id();
        if best_recall.as_ref().map(|(r, _)| record.recall_test > *r).unwrap_or(true) {
            best_recall = Some((record.recall_test, id.clone()));
        }
        if best_precision
            .as_ref()
            .map(|(p, _)| record.precision_test.value > *p)
            .unwrap_or(true)
        {
            best_precision = Some((record.precision_test.value, id));
        }
    }

    let (best_recall, best_recall_model) =
        best_recall.unwrap_or((0.0, "none".into()));
    let (best_precision, best_precision_model) =
        best_precision.unwrap_or((0.0, "none".into()));
    Ok(ScreeningRow {
        variable: variable.to_string(),
        best_recall,
        best_recall_model,
        best_precision,
        best_precision_model,
        correlation: correlation.value,
        stats,
        degenerate: correlation.degenerate || !evaluated_any,
    })
}

/// Expand the algorithm set into concrete (algo, hyperparams, seed tag)
/// training tasks; k-NN becomes one task per k in 1..=4.
fn expand_algos(algos: &[AlgoId], hp: &Hyperparams) -> Vec<(AlgoId, Hyperparams, String)> {
    let mut out = Vec::new();
    for &algo in algos {
        match algo {
            AlgoId::Knn => {
                for k in 1..=4 {
                    out.push((algo, hp.with_knn_k(k), format!("train-knn{k}")));
                }
            }
            AlgoId::Svm => out.push((algo, *hp, "train-svm".into())),
            AlgoId::LogReg => out.push((algo, *hp, "train-logreg".into())),
            AlgoId::Gbm => out.push((algo, *hp, "train-gbm".into())),
        }
    }
    out
}

/// One-column dataset for the screened variable, preserving the label
/// vector. Indicator columns become binary variables; numeric stay numeric.
fn single_column_dataset(data: &Dataset, j: usize, name: &str) -> Result<Dataset> {
    let col = &data.columns()[j];
    let var = if col.indicator {
        VariableSpec::binary(name)
    } else {
        VariableSpec::numeric(name)
    };
    let schema = Arc::new(Schema::new(vec![var], data.schema().label_name())?);
    Dataset::new(schema, data.column(j), data.labels().to_vec())
}
