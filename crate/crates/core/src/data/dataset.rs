//! Encoded feature table plus binary label vector.

use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::schema::{hex, EncodedColumn, Schema};
use crate::error::{Error, Result};

/// Class sizes of a labelled dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub positives: usize,
    pub negatives: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.positives + self.negatives
    }
}

/// Immutable encoded dataset: an `n x w` row-major table of finite reals and
/// a `{0,1}` label per row. Values never change after construction, so
/// datasets are cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Arc<Schema>,
    values: Vec<f64>,
    labels: Vec<u8>,
    width: usize,
}

impl Dataset {
    /// Build and validate a dataset. Checks row width, finiteness, label
    /// domain, and that indicator-derived columns hold only 0 or 1.
    pub fn new(schema: Arc<Schema>, values: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        let width = schema.encoded_width();
        if width == 0 {
            return Err(Error::Schema("schema encodes zero columns".into()));
        }
        if values.len() != labels.len() * width {
            return Err(Error::Schema(format!(
                "value buffer has {} entries, expected {} rows x {} columns",
                values.len(),
                labels.len(),
                width
            )));
        }
        for (i, &l) in labels.iter().enumerate() {
            if l > 1 {
                return Err(Error::Value(format!("label at row {i} is {l}, expected 0 or 1")));
            }
        }
        let columns = schema.columns();
        for (idx, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Value(format!(
                    "non-finite value {v} at row {} column '{}'",
                    idx / width,
                    columns[idx % width].name
                )));
            }
            if columns[idx % width].indicator && v != 0.0 && v != 1.0 {
                return Err(Error::Value(format!(
                    "indicator column '{}' holds {v} at row {}, expected 0 or 1",
                    columns[idx % width].name,
                    idx / width
                )));
            }
        }
        Ok(Dataset { schema, values, labels, width })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_arc(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.width)
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Encoded column names, aligned with row entries.
    pub fn column_names(&self) -> Vec<&str> {
        self.schema.columns().iter().map(|c| c.name.as_str()).collect()
    }

    pub fn columns(&self) -> &[EncodedColumn] {
        self.schema.columns()
    }

    /// Copy of a single encoded column.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.row(i)[j]).collect()
    }

    /// Counts of label 1 and label 0; sums to `n_rows`.
    pub fn class_counts(&self) -> ClassCounts {
        let positives = self.labels.iter().filter(|&&l| l == 1).count();
        ClassCounts { positives, negatives: self.labels.len() - positives }
    }

    /// Row indices with the given label, ascending.
    pub fn indices_with_label(&self, label: u8) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| self.labels[i] == label).collect()
    }

    /// New dataset holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(indices.len() * self.width);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset { schema: Arc::clone(&self.schema), values, labels, width: self.width }
    }

    /// Stack datasets sharing one schema, preserving argument order.
    pub fn concat(parts: &[&Dataset]) -> Result<Dataset> {
        let first = parts.first().ok_or_else(|| Error::Argument("concat of nothing".into()))?;
        let fp = first.schema.fingerprint();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for p in parts {
            if p.schema.fingerprint() != fp {
                return Err(Error::Schema("concat inputs use different schemas".into()));
            }
            values.extend_from_slice(&p.values);
            labels.extend_from_slice(&p.labels);
        }
        Ok(Dataset { schema: Arc::clone(&first.schema), values, labels, width: first.width })
    }

    /// Append already-encoded rows (used by the oversamplers). Validates the
    /// new rows under the same rules as `new`.
    pub(crate) fn with_extra_rows(&self, rows: Vec<f64>, labels: Vec<u8>) -> Result<Dataset> {
        let mut values = self.values.clone();
        values.extend_from_slice(&rows);
        let mut all_labels = self.labels.clone();
        all_labels.extend_from_slice(&labels);
        Dataset::new(Arc::clone(&self.schema), values, all_labels)
    }

    /// Content hash over schema, labels and the raw value bytes. Two datasets
    /// with the same fingerprint are bit-identical.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.schema.fingerprint().as_bytes());
        hasher.update((self.n_rows() as u64).to_le_bytes());
        hasher.update((self.width as u64).to_le_bytes());
        hasher.update(&self.labels);
        for v in &self.values {
            hasher.update(v.to_le_bytes());
        }
        hex(&hasher.finalize())
    }
}
