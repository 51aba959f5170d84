//! k-nearest-neighbor classifier by exhaustive scan.
//!
//! Distances are Euclidean over the encoded columns. Distance ties break
//! toward the lower training-row index; an even vote breaks toward the label
//! of the single nearest neighbor.

use serde::{Deserialize, Serialize};

use super::{Hyperparams, TrainedModel};
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub width: usize,
    pub rows: Vec<f64>,
    pub labels: Vec<u8>,
    pub schema_fingerprint: String,
}

impl KnnModel {
    fn n_rows(&self) -> usize {
        self.labels.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.width..(i + 1) * self.width]
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        // sorted buffer of the best (squared distance, index) pairs
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for i in 0..self.n_rows() {
            let d2: f64 = self
                .row(i)
                .iter()
                .zip(row)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let cand = (d2, i);
            if best.len() < self.k {
                let pos = best.partition_point(|&(d, j)| (d, j) < cand);
                best.insert(pos, cand);
            } else if cand < best[self.k - 1] {
                let pos = best.partition_point(|&(d, j)| (d, j) < cand);
                best.insert(pos, cand);
                best.pop();
            }
        }
        let ones = best.iter().filter(|&&(_, i)| self.labels[i] == 1).count();
        let zeros = best.len() - ones;
        if ones > zeros {
            1
        } else if zeros > ones {
            0
        } else {
            self.labels[best[0].1]
        }
    }
}

pub fn train_knn(train: &Dataset, hp: &Hyperparams) -> Result<TrainedModel> {
    hp.validate()?;
    if hp.knn.k > train.n_rows() {
        return Err(Error::Argument(format!(
            "knn needs at least k={} training rows, got {}",
            hp.knn.k,
            train.n_rows()
        )));
    }
    let mut rows = Vec::with_capacity(train.n_rows() * train.width());
    for r in train.rows() {
        rows.extend_from_slice(r);
    }
    Ok(TrainedModel::Knn(KnnModel {
        k: hp.knn.k,
        width: train.width(),
        rows,
        labels: train.labels().to_vec(),
        schema_fingerprint: train.schema().fingerprint(),
    }))
}
