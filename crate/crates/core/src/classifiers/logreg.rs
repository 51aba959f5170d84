//! Logistic regression trained by a damped Newton method on the
//! L2-regularized negative log-likelihood
//! `sum_i log(1 + exp(-z_i (w.x_i + b))) + lambda/2 ||w||^2`
//! (intercept unpenalized), iterated until the gradient norm drops to the
//! configured tolerance. Decision threshold is 0.5 on the predicted
//! probability.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{require_both_classes, Hyperparams, TrainedModel};
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub schema_fingerprint: String,
}

impl LogRegModel {
    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, row) + self.intercept)
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        (self.probability(row) > 0.5) as u8
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(-t))` without overflow.
fn log1p_exp_neg(t: f64) -> f64 {
    if t > 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// Penalized loss at `theta = (w, b)`; the last coordinate is the intercept.
pub(crate) fn penalized_loss(data: &Dataset, theta: &[f64], lambda: f64) -> f64 {
    let (w, b) = theta.split_at(theta.len() - 1);
    let b = b[0];
    let mut loss = 0.0;
    for (row, &l) in data.rows().zip(data.labels()) {
        let m = dot(w, row) + b;
        let z = if l == 1 { 1.0 } else { -1.0 };
        loss += log1p_exp_neg(z * m);
    }
    loss + 0.5 * lambda * w.iter().map(|x| x * x).sum::<f64>()
}

/// Analytic gradient of `penalized_loss` at `theta`.
pub(crate) fn gradient(data: &Dataset, theta: &[f64], lambda: f64) -> Vec<f64> {
    let d = theta.len() - 1;
    let (w, b) = theta.split_at(d);
    let b = b[0];
    let mut g = vec![0.0; d + 1];
    for (row, &l) in data.rows().zip(data.labels()) {
        let p = sigmoid(dot(w, row) + b);
        let r = p - l as f64;
        for j in 0..d {
            g[j] += r * row[j];
        }
        g[d] += r;
    }
    for j in 0..d {
        g[j] += lambda * w[j];
    }
    g
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn train_logreg(train: &Dataset, hp: &Hyperparams) -> Result<TrainedModel> {
    hp.validate()?;
    require_both_classes(train, "logistic regression")?;

    let lambda = hp.logreg.lambda;
    let tol = hp.logreg.tolerance;
    let d = train.width();
    let mut theta = vec![0.0; d + 1];
    let mut loss = penalized_loss(train, &theta, lambda);
    let mut grad = gradient(train, &theta, lambda);
    let mut grad_norm = norm(&grad);

    let mut iterations = 0;
    while grad_norm > tol {
        if iterations >= hp.logreg.max_iterations {
            return Err(Error::Convergence { grad_norm, iterations });
        }
        iterations += 1;

        let hessian = hessian_matrix(train, &theta, lambda);
        let g = DVector::from_column_slice(&grad);
        let step = hessian
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&g))
            .or_else(|| hessian.lu().solve(&g))
            .ok_or(Error::Convergence { grad_norm, iterations })?;

        // Backtracking: halve the Newton step until the loss stops rising.
        // Near the optimum the true decrease of a full step drops below the
        // float resolution of the loss, so steps within noise of the current
        // loss are accepted; convergence is driven by the gradient norm.
        let noise = 1e-12 * (1.0 + loss.abs());
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = theta
                .iter()
                .zip(step.iter())
                .map(|(t, s)| t - alpha * s)
                .collect();
            let cand_loss = penalized_loss(train, &cand, lambda);
            if cand_loss.is_finite() && cand_loss <= loss + noise {
                theta = cand;
                loss = cand_loss;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // Flat to machine precision; report where we stopped.
            return Err(Error::Convergence { grad_norm, iterations });
        }
        grad = gradient(train, &theta, lambda);
        grad_norm = norm(&grad);
    }

    let intercept = theta[d];
    theta.truncate(d);
    Ok(TrainedModel::LogReg(LogRegModel {
        weights: theta,
        intercept,
        schema_fingerprint: train.schema().fingerprint(),
    }))
}

/// Hessian `[X'DX + lambda I, X'D1; 1'DX, 1'D1]` with `D = diag(p(1-p))`.
fn hessian_matrix(data: &Dataset, theta: &[f64], lambda: f64) -> DMatrix<f64> {
    let d = theta.len() - 1;
    let (w, b) = theta.split_at(d);
    let b = b[0];
    let mut h = DMatrix::zeros(d + 1, d + 1);
    for row in data.rows() {
        let p = sigmoid(dot(w, row) + b);
        let s = p * (1.0 - p);
        for j in 0..d {
            let sj = s * row[j];
            for k in j..d {
                h[(j, k)] += sj * row[k];
            }
            h[(j, d)] += sj;
        }
        h[(d, d)] += s;
    }
    for j in 0..d {
        h[(j, j)] += lambda;
        for k in (j + 1)..=d {
            h[(k, j)] = h[(j, k)];
        }
    }
    h
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

    fn unwrap_logreg(model: TrainedModel) -> LogRegModel {
        match model {
            TrainedModel::LogReg(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn mirror_symmetric_data_has_zero_intercept() {
        let d = dataset_1d(&[1.5, 0.5, -1.5, -0.5], &[1, 1, 0, 0]);
        let m = unwrap_logreg(train_logreg(&d, &Hyperparams::default()).unwrap());
        assert!(m.intercept.abs() < 1e-6, "intercept {}", m.intercept);
    }

    #[test]
    fn all_positive_labels_are_degenerate() {
        let d = dataset_1d(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        assert!(matches!(
            train_logreg(&d, &Hyperparams::default()),
            Err(Error::DegenerateClass(_))
        ));
    }

    #[test]
    fn exhausted_iterations_report_the_gradient_norm() {
        let d = dataset_1d(&[0.5, 1.5, -0.5, -1.5], &[1, 1, 0, 0]);
        let mut hp = Hyperparams::default();
        hp.logreg.max_iterations = 1;
        hp.logreg.tolerance = 1e-300;
        match train_logreg(&d, &hp) {
            Err(Error::Convergence { grad_norm, iterations }) => {
                assert!(grad_norm > 0.0);
                assert_eq!(iterations, 1);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn gradient_norm_at_solution_is_within_tolerance() {
        let d = dataset_1d(&[0.2, 1.0, 2.2, -0.3, -1.1, -2.4], &[1, 1, 1, 0, 0, 0]);
        let hp = Hyperparams::default();
        let m = unwrap_logreg(train_logreg(&d, &hp).unwrap());
        let mut theta = m.weights.clone();
        theta.push(m.intercept);
        let g = gradient(&d, &theta, hp.logreg.lambda);
        assert!(norm(&g) <= hp.logreg.tolerance);
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(99);
        for _ in 0..20 {
            let n = rng.gen_range(4..10);
            let schema = Arc::new(
                Schema::new(
                    vec![VariableSpec::numeric("a"), VariableSpec::numeric("b")],
                    "fall",
                )
                .unwrap(),
            );
            let mut values = Vec::new();
            let mut labels = Vec::new();
            for i in 0..n {
                values.push(rng.gen_range(-2.0..2.0));
                values.push(rng.gen_range(-2.0..2.0));
                labels.push((i % 2) as u8);
            }
            let d = Dataset::new(schema, values, labels).unwrap();
            let theta: Vec<f64> =
                (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lambda = 0.7;
            let g = gradient(&d, &theta, lambda);
            let h = 1e-5;
            for j in 0..theta.len() {
                let mut plus = theta.clone();
                plus[j] += h;
                let mut minus = theta.clone();
                minus[j] -= h;
                let fd = (penalized_loss(&d, &plus, lambda)
                    - penalized_loss(&d, &minus, lambda))
                    / (2.0 * h);
                let scale = g[j].abs().max(fd.abs()).max(1e-8);
                assert!(
                    (g[j] - fd).abs() / scale < 1e-5,
                    "component {j}: analytic {} vs fd {fd}",
                    g[j]
                );
            }
        }
    }
}
