//! Linear SVM trained by epoch-based stochastic subgradient descent on the
//! L2-regularized hinge loss `lambda/2 ||w||^2 + mean_i hinge(y_i (w.x_i + b))`
//! with step size `1/(lambda t)`. The intercept is not regularized.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{require_both_classes, Hyperparams, TrainedModel};
use crate::data::Dataset;
use crate::error::Result;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub schema_fingerprint: String,
}

impl SvmModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        dot(&self.weights, row) + self.intercept
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        (self.decision(row) > 0.0) as u8
    }

    /// Regularized hinge objective on a dataset, with the lambda actually
    /// used during training.
    pub fn objective(&self, data: &Dataset, lambda: f64) -> f64 {
        let norm2: f64 = self.weights.iter().map(|w| w * w).sum();
        let hinge: f64 = data
            .rows()
            .zip(data.labels())
            .map(|(row, &l)| {
                let y = if l == 1 { 1.0 } else { -1.0 };
                (1.0 - y * self.decision(row)).max(0.0)
            })
            .sum::<f64>()
            / data.n_rows() as f64;
        0.5 * lambda * norm2 + hinge
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Effective regularization weight: configured value, or `1/n`.
pub(crate) fn effective_lambda(hp: &Hyperparams, n: usize) -> f64 {
    hp.svm.lambda.unwrap_or(1.0 / n as f64)
}

pub fn train_svm_linear(train: &Dataset, hp: &Hyperparams, seed: u64) -> Result<TrainedModel> {
    hp.validate()?;
    require_both_classes(train, "linear svm")?;

    let n = train.n_rows();
    let width = train.width();
    let lambda = effective_lambda(hp, n);
    let mut rng = rng_from_seed(seed);

    let mut w = vec![0.0; width];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut t: u64 = 1;
    for _ in 0..hp.svm.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let row = train.row(i);
            let y = if train.label(i) == 1 { 1.0 } else { -1.0 };
            let eta = 1.0 / (lambda * t as f64);
            let margin = y * (dot(&w, row) + b);
            let shrink = 1.0 - eta * lambda;
            for wj in w.iter_mut() {
                *wj *= shrink;
            }
            if margin < 1.0 {
                let scale = eta * y;
                for (wj, &xj) in w.iter_mut().zip(row) {
                    *wj += scale * xj;
                }
                b += scale;
            }
            t += 1;
        }
    }

    Ok(TrainedModel::Svm(SvmModel {
        weights: w,
        intercept: b,
        schema_fingerprint: train.schema().fingerprint(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Schema, VariableSpec};
    use std::sync::Arc;

    fn dataset_1d(xs: &[f64], labels: &[u8]) -> Dataset {
        let schema =
            Arc::new(Schema::new(vec![VariableSpec::numeric("x")], "fall").unwrap());
        Dataset::new(schema, xs.to_vec(), labels.to_vec()).unwrap()
    }

    /// 20-point 2-D fixture, linearly separable with a wide margin.
    fn separable_fixture() -> Dataset {
        let schema = Arc::new(
            Schema::new(
                vec![VariableSpec::numeric("x"), VariableSpec::numeric("y")],
                "fall",
            )
            .unwrap(),
        );
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            values.push(3.0 + 0.2 * i as f64);
            values.push(3.0 - 0.1 * i as f64);
            labels.push(1);
        }
        for i in 0..10 {
            values.push(-3.0 - 0.2 * i as f64);
            values.push(-3.0 + 0.1 * i as f64);
            labels.push(0);
        }
        Dataset::new(schema, values, labels).unwrap()
    }

    fn unwrap_svm(model: TrainedModel) -> SvmModel {
        match model {
            TrainedModel::Svm(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn separable_pair_is_classified_correctly() {
        let d = dataset_1d(&[-1.0, 1.0], &[0, 1]);
        let model = train_svm_linear(&d, &Hyperparams::default(), 1).unwrap();
        assert_eq!(model.predict_batch(&d).unwrap(), vec![0, 1]);
    }

    #[test]
    fn label_flip_negates_predictions() {
        let d = dataset_1d(&[-2.0, -1.0, 1.0, 2.0], &[0, 0, 1, 1]);
        let flipped = dataset_1d(&[-2.0, -1.0, 1.0, 2.0], &[1, 1, 0, 0]);
        let a = train_svm_linear(&d, &Hyperparams::default(), 4).unwrap();
        let b = train_svm_linear(&flipped, &Hyperparams::default(), 4).unwrap();
        let pa = a.predict_batch(&d).unwrap();
        let pb = b.predict_batch(&d).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(*x, 1 - *y);
        }
    }

    #[test]
    fn separable_fixture_reaches_perfect_training_accuracy() {
        let d = separable_fixture();
        let model = train_svm_linear(&d, &Hyperparams::default(), 7).unwrap();
        let pred = model.predict_batch(&d).unwrap();
        assert_eq!(pred, d.labels());
    }

    #[test]
    fn final_objective_does_not_exceed_initial() {
        let d = separable_fixture();
        let hp = Hyperparams::default();
        let lambda = effective_lambda(&hp, d.n_rows());
        let model = unwrap_svm(train_svm_linear(&d, &hp, 11).unwrap());
        // objective at w = 0, b = 0 is mean hinge(0) = 1
        let initial = 1.0;
        assert!(model.objective(&d, lambda) <= initial + 1e-9);
    }

    #[test]
    fn training_is_deterministic_in_the_seed() {
        let d = separable_fixture();
        let a = unwrap_svm(train_svm_linear(&d, &Hyperparams::default(), 5).unwrap());
        let b = unwrap_svm(train_svm_linear(&d, &Hyperparams::default(), 5).unwrap());
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.intercept, b.intercept);
        let c = unwrap_svm(train_svm_linear(&d, &Hyperparams::default(), 6).unwrap());
        assert_ne!(a.weights, c.weights);
    }

    #[test]
    fn single_class_input_is_degenerate() {
        let d = dataset_1d(&[1.0, 2.0], &[1, 1]);
        assert!(train_svm_linear(&d, &Hyperparams::default(), 1).is_err());
    }
}
