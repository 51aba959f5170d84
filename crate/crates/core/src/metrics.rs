//! Confusion-matrix construction and the derived metrics.
//!
//! The positive class is fall = 1. Accuracy is `(TP+TN)/(TP+TN+FP+FN)`,
//! recall `TP/(TP+FN)`, precision `TP/(TP+FP)`. Precision of a model that
//! predicted no positives is reported as 0 with a degenerate marker instead
//! of an error, because the screening loop must survive such models.

use serde::{Deserialize, Serialize};

use crate::classifiers::TrainedModel;
use crate::data::SplitPair;
use crate::error::{Error, Result};

/// TP/TN/FP/FN counts of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

/// A metric value plus a marker for the degenerate convention described on
/// the producing operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub degenerate: bool,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Count the four agreement cells of predicted vs actual labels.
pub fn confusion(predicted: &[u8], actual: &[u8]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::Argument(format!(
            "predicted has {} labels, actual has {}",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Argument("confusion of empty label vectors".into()));
    }
    let mut cm = ConfusionMatrix { tp: 0, tn: 0, fp: 0, fn_: 0 };
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (1, 1) => cm.tp += 1,
            (0, 0) => cm.tn += 1,
            (1, 0) => cm.fp += 1,
            (0, 1) => cm.fn_ += 1,
            _ => return Err(Error::Value("labels must be 0 or 1".into())),
        }
    }
    Ok(cm)
}

/// `(tp + tn) / total`.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::UndefinedMetric("accuracy of an empty matrix".into()));
    }
    Ok((cm.tp + cm.tn) as f64 / total as f64)
}

/// `tp / (tp + fn)`.
pub fn recall(cm: &ConfusionMatrix) -> Result<f64> {
    let denom = cm.tp + cm.fn_;
    if denom == 0 {
        return Err(Error::UndefinedMetric("recall with no positives evaluated".into()));
    }
    Ok(cm.tp as f64 / denom as f64)
}

/// `tp / (tp + fp)`; 0 with the degenerate flag when nothing was predicted
/// positive.
pub fn precision(cm: &ConfusionMatrix) -> Flagged {
    let denom = cm.tp + cm.fp;
    if denom == 0 {
        Flagged { value: 0.0, degenerate: true }
    } else {
        Flagged { value: cm.tp as f64 / denom as f64, degenerate: false }
    }
}

/// One result row: train/test accuracy, test recall and precision, and the
/// test confusion matrix.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    pub accuracy_train: f64,
    pub accuracy_test: f64,
    pub recall_test: f64,
    pub precision_test: Flagged,
    pub cm_test: ConfusionMatrix,
}

/// Evaluate a trained model on a split: accuracy on both halves, recall and
/// precision on the test half.
pub fn evaluate(model: &TrainedModel, split: &SplitPair) -> Result<EvalRecord> {
    let pred_train = model.predict_batch(&split.train)?;
    let pred_test = model.predict_batch(&split.test)?;
    let cm_train = confusion(&pred_train, split.train.labels())?;
    let cm_test = confusion(&pred_test, split.test.labels())?;
    Ok(EvalRecord {
        accuracy_train: accuracy(&cm_train)?,
        accuracy_test: accuracy(&cm_test)?,
        recall_test: recall(&cm_test)?,
        precision_test: precision(&cm_test),
        cm_test,
    })
}
