//! The four binary classifiers, trained from scratch on encoded feature
//! vectors. Every trainer is deterministic given `(data, hyperparams, seed)`
//! and every model remembers the schema fingerprint it was trained under.

mod gbm;
mod knn;
mod logreg;
mod svm;

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gbm::{train_gbm, GbmModel, Tree, TreeNode};
pub use knn::{train_knn, KnnModel};
pub use logreg::{train_logreg, LogRegModel};
pub use svm::{train_svm_linear, SvmModel};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Version of the model JSON document.
const MODEL_FILE_VERSION: u32 = 1;

/// Algorithm selector, also the `--algos` flag vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoId {
    Svm,
    LogReg,
    Gbm,
    Knn,
}

impl AlgoId {
    pub const ALL: [AlgoId; 4] = [AlgoId::Svm, AlgoId::LogReg, AlgoId::Gbm, AlgoId::Knn];

    pub fn display_name(&self) -> &'static str {
        match self {
            AlgoId::Svm => "Support Vector Machine",
            AlgoId::LogReg => "Logistic Regression",
            AlgoId::Gbm => "Gradient Boosting Machine",
            AlgoId::Knn => "k-nearest neighbor",
        }
    }
}

impl FromStr for AlgoId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" => Ok(AlgoId::Svm),
            "logreg" => Ok(AlgoId::LogReg),
            "gbm" => Ok(AlgoId::Gbm),
            "knn" => Ok(AlgoId::Knn),
            other => Err(Error::Argument(format!(
                "unknown algorithm '{other}', expected svm | logreg | gbm | knn"
            ))),
        }
    }
}

/// Linear SVM settings. `lambda = None` uses `1/n` at training time, the
/// conventional default regularization for a hinge-loss objective stated as
/// `lambda/2 ||w||^2 + mean hinge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: Option<f64>,
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub lambda: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub stages: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_rows_per_leaf: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

/// Hyperparameters for all four algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub svm: SvmParams,
    pub logreg: LogRegParams,
    pub gbm: GbmParams,
    pub knn: KnnParams,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            svm: SvmParams { lambda: None, epochs: 1000 },
            logreg: LogRegParams { lambda: 1.0, tolerance: 1e-8, max_iterations: 100 },
            gbm: GbmParams {
                stages: 100,
                learning_rate: 0.1,
                max_depth: 3,
                min_rows_per_leaf: 2,
            },
            knn: KnnParams { k: 1 },
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.svm.lambda {
            if !(l > 0.0) {
                return Err(Error::Argument("svm lambda must be positive".into()));
            }
        }
        if self.svm.epochs == 0 {
            return Err(Error::Argument("svm epochs must be >= 1".into()));
        }
        if !(self.logreg.lambda > 0.0) {
            return Err(Error::Argument("logreg lambda must be positive".into()));
        }
        if !(self.logreg.tolerance > 0.0) {
            return Err(Error::Argument("logreg tolerance must be positive".into()));
        }
        if self.logreg.max_iterations == 0 {
            return Err(Error::Argument("logreg max iterations must be >= 1".into()));
        }
        if !(self.gbm.learning_rate > 0.0) {
            return Err(Error::Argument("gbm learning rate must be positive".into()));
        }
        if self.gbm.max_depth == 0 || self.gbm.min_rows_per_leaf == 0 {
            return Err(Error::Argument("gbm depth and leaf size must be >= 1".into()));
        }
        if !(1..=4).contains(&self.knn.k) {
            return Err(Error::Argument(format!(
                "knn k must be in 1..=4, got {}",
                self.knn.k
            )));
        }
        Ok(())
    }

    pub fn with_knn_k(mut self, k: usize) -> Self {
        self.knn.k = k;
        self
    }
}

/// A fitted classifier: algorithm id, parameters, and the decision rule over
/// encoded feature vectors. Immutable after fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum TrainedModel {
    Svm(SvmModel),
    LogReg(LogRegModel),
    Gbm(GbmModel),
    Knn(KnnModel),
}

impl TrainedModel {
    pub fn algorithm(&self) -> AlgoId {
        match self {
            TrainedModel::Svm(_) => AlgoId::Svm,
            TrainedModel::LogReg(_) => AlgoId::LogReg,
            TrainedModel::Gbm(_) => AlgoId::Gbm,
            TrainedModel::Knn(_) => AlgoId::Knn,
        }
    }

    /// Short id used in screening rows and report footers.
    pub fn short_id(&self) -> String {
        match self {
            TrainedModel::Svm(_) => "svm".into(),
            TrainedModel::LogReg(_) => "logreg".into(),
            TrainedModel::Gbm(_) => "gbm".into(),
            TrainedModel::Knn(m) => format!("knn(k={})", m.k),
        }
    }

    pub fn schema_fingerprint(&self) -> &str {
        match self {
            TrainedModel::Svm(m) => &m.schema_fingerprint,
            TrainedModel::LogReg(m) => &m.schema_fingerprint,
            TrainedModel::Gbm(m) => &m.schema_fingerprint,
            TrainedModel::Knn(m) => &m.schema_fingerprint,
        }
    }

    /// Decision rule for one encoded row.
    pub fn predict_row(&self, row: &[f64]) -> u8 {
        match self {
            TrainedModel::Svm(m) => m.predict_row(row),
            TrainedModel::LogReg(m) => m.predict_row(row),
            TrainedModel::Gbm(m) => m.predict_row(row),
            TrainedModel::Knn(m) => m.predict_row(row),
        }
    }

    /// Element-wise prediction over a dataset encoded under the training
    /// schema. Rows are scored in parallel; output order matches input order.
    pub fn predict_batch(&self, test: &Dataset) -> Result<Vec<u8>> {
        let fp = test.schema().fingerprint();
        if fp != self.schema_fingerprint() {
            return Err(Error::Schema(format!(
                "schema fingerprint mismatch: model {}..., data {}...",
                &self.schema_fingerprint()[..12.min(self.schema_fingerprint().len())],
                &fp[..12.min(fp.len())]
            )));
        }
        Ok((0..test.n_rows())
            .into_par_iter()
            .map(|i| self.predict_row(test.row(i)))
            .collect())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            version: u32,
            #[serde(flatten)]
            model: &'a TrainedModel,
        }
        serde_json::to_string_pretty(&Doc { version: MODEL_FILE_VERSION, model: self })
            .expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Doc {
            version: u32,
            #[serde(flatten)]
            model: TrainedModel,
        }
        let doc: Doc = serde_json::from_str(text)?;
        if doc.version != MODEL_FILE_VERSION {
            return Err(Error::Value(format!(
                "unsupported model file version {}, expected {}",
                doc.version, MODEL_FILE_VERSION
            )));
        }
        Ok(doc.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Train one algorithm with the given hyperparameters.
pub fn train(
    algo: AlgoId,
    data: &Dataset,
    hp: &Hyperparams,
    seed: u64,
) -> Result<TrainedModel> {
    match algo {
        AlgoId::Svm => train_svm_linear(data, hp, seed),
        AlgoId::LogReg => train_logreg(data, hp),
        AlgoId::Gbm => train_gbm(data, hp),
        AlgoId::Knn => train_knn(data, hp),
    }
}

pub(crate) fn require_both_classes(data: &Dataset, what: &str) -> Result<()> {
    let c = data.class_counts();
    if c.positives == 0 || c.negatives == 0 {
        return Err(Error::DegenerateClass(format!(
            "{what} needs both classes, got {} positives and {} negatives",
            c.positives, c.negatives
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Schema, VariableSpec};
    use std::sync::Arc;

    fn dataset() -> Dataset {
        let schema = Arc::new(
            Schema::new(
                vec![VariableSpec::numeric("x"), VariableSpec::numeric("y")],
                "fall",
            )
            .unwrap(),
        );
        let values = vec![
            -2.0, -2.0, -1.5, -2.5, -2.2, -1.8, 2.0, 2.0, 1.5, 2.5, 2.2, 1.8,
        ];
        Dataset::new(schema, values, vec![0, 0, 0, 1, 1, 1]).unwrap()
    }

    #[test]
    fn default_hyperparams_validate() {
        Hyperparams::default().validate().unwrap();
        let mut hp = Hyperparams::default();
        hp.knn.k = 5;
        assert!(hp.validate().is_err());
        let mut hp = Hyperparams::default();
        hp.logreg.tolerance = 0.0;
        assert!(hp.validate().is_err());
    }

    #[test]
    fn predict_batch_rejects_foreign_schema() {
        let d = dataset();
        let model = train(AlgoId::Knn, &d, &Hyperparams::default(), 1).unwrap();
        let other_schema =
            Arc::new(Schema::new(vec![VariableSpec::numeric("z")], "fall").unwrap());
        let other = Dataset::new(other_schema, vec![1.0], vec![0]).unwrap();
        assert!(matches!(model.predict_batch(&other), Err(Error::Schema(_))));
    }

    #[test]
    fn predict_batch_on_empty_test_is_empty() {
        let d = dataset();
        let model = train(AlgoId::Svm, &d, &Hyperparams::default(), 1).unwrap();
        let empty = Dataset::new(d.schema_arc(), vec![], vec![]).unwrap();
        assert_eq!(model.predict_batch(&empty).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn every_model_emits_binary_labels_on_its_training_set() {
        let d = dataset();
        for algo in AlgoId::ALL {
            let model = train(algo, &d, &Hyperparams::default(), 3).unwrap();
            let pred = model.predict_batch(&d).unwrap();
            assert_eq!(pred.len(), d.n_rows());
            assert!(pred.iter().all(|&p| p <= 1));
        }
    }

    #[test]
    fn model_json_round_trips_for_all_algorithms() {
        let d = dataset();
        for algo in AlgoId::ALL {
            let model = train(algo, &d, &Hyperparams::default(), 5).unwrap();
            let reloaded = TrainedModel::from_json(&model.to_json()).unwrap();
            assert_eq!(
                reloaded.predict_batch(&d).unwrap(),
                model.predict_batch(&d).unwrap()
            );
            assert_eq!(reloaded.short_id(), model.short_id());
        }
    }

    #[test]
    fn model_file_version_is_checked() {
        let d = dataset();
        let model = train(AlgoId::Svm, &d, &Hyperparams::default(), 5).unwrap();
        let json = model.to_json().replace("\"version\": 1", "\"version\": 9");
        assert!(TrainedModel::from_json(&json).is_err());
    }

    #[test]
    fn constant_zero_column_changes_no_prediction() {
        // Same data with an extra all-zero indicator appended.
        let base = dataset();
        let wide_schema = Arc::new(
            Schema::new(
                vec![
                    VariableSpec::numeric("x"),
                    VariableSpec::numeric("y"),
                    VariableSpec::binary("pad"),
                ],
                "fall",
            )
            .unwrap(),
        );
        let mut values = Vec::new();
        for row in base.rows() {
            values.extend_from_slice(row);
            values.push(0.0);
        }
        let wide =
            Dataset::new(wide_schema, values, base.labels().to_vec()).unwrap();

        for algo in AlgoId::ALL {
            let narrow = train(algo, &base, &Hyperparams::default(), 9).unwrap();
            let padded = train(algo, &wide, &Hyperparams::default(), 9).unwrap();
            assert_eq!(
                narrow.predict_batch(&base).unwrap(),
                padded.predict_batch(&wide).unwrap(),
                "{algo:?}"
            );
        }
    }
}
