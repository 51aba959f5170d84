//! CSV loading against a declared schema.

use std::path::Path;
use std::sync::Arc;

use super::dataset::Dataset;
use super::encode::{dummy_encode, RawValue};
use super::schema::{Schema, VarKind};
use crate::error::{Error, Result};

/// Load a UTF-8 CSV with a header row into a dummy-encoded dataset. The
/// header must carry exactly the schema's variable names plus the label
/// column; row order is preserved. Empty cells are rejected.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path.as_ref())?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();

    let mut var_cols = Vec::with_capacity(schema.variables().len());
    for var in schema.variables() {
        let idx = headers.iter().position(|h| h == &var.name).ok_or_else(|| {
            Error::Schema(format!("csv is missing column '{}'", var.name))
        })?;
        var_cols.push(idx);
    }
    let label_col = headers
        .iter()
        .position(|h| h == schema.label_name())
        .ok_or_else(|| Error::Schema(format!("csv is missing label column '{}'", schema.label_name())))?;

    let expected = schema.variables().len() + 1;
    if headers.len() != expected {
        return Err(Error::Schema(format!(
            "csv has {} columns, schema declares {} (variables plus label)",
            headers.len(),
            expected
        )));
    }

    let width = schema.encoded_width();
    let mut values: Vec<f64> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let mut raw = Vec::with_capacity(schema.variables().len());
        for (var, &col) in schema.variables().iter().zip(&var_cols) {
            let cell = record.get(col).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::Parse {
                    row: row_idx,
                    message: format!("empty cell in column '{}'", var.name),
                });
            }
            raw.push(parse_cell(cell, &var.kind, &var.name, row_idx)?);
        }
        let label_cell = record.get(label_col).unwrap_or("");
        let label = match label_cell {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Parse {
                    row: row_idx,
                    message: format!(
                        "label column '{}' holds '{other}', expected 0 or 1",
                        schema.label_name()
                    ),
                });
            }
        };
        let encoded = dummy_encode(&raw, schema).map_err(|e| match e {
            Error::Value(m) => Error::Parse { row: row_idx, message: m },
            other => other,
        })?;
        debug_assert_eq!(encoded.len(), width);
        values.extend_from_slice(&encoded);
        labels.push(label);
    }

    Dataset::new(Arc::new(schema.clone()), values, labels)
}

/// Write a dataset back to CSV in raw (pre-encoding) form: one column per
/// schema variable plus the label. Numeric cells use the shortest
/// representation that parses back to the identical float, so a
/// write-then-load round trip is bit-exact.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let schema = data.schema();
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<&str> =
        schema.variables().iter().map(|v| v.name.as_str()).collect();
    header.push(schema.label_name());
    writer.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..data.n_rows() {
        record.clear();
        for value in super::encode::decode_row(data.row(i), schema)? {
            record.push(match value {
                RawValue::Number(x) => format!("{x}"),
                RawValue::Flag(b) => if b { "1".into() } else { "0".into() },
                RawValue::Level(l) => l,
            });
        }
        record.push(data.label(i).to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

fn parse_cell(cell: &str, kind: &VarKind, name: &str, row: usize) -> Result<RawValue> {
    match kind {
        VarKind::Numeric => {
            let x: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                message: format!("non-numeric token '{cell}' in numeric column '{name}'"),
            })?;
            Ok(RawValue::Number(x))
        }
        VarKind::Binary => match cell {
            "0" => Ok(RawValue::Flag(false)),
            "1" => Ok(RawValue::Flag(true)),
            other => Err(Error::Parse {
                row,
                message: format!("binary column '{name}' holds '{other}', expected 0 or 1"),
            }),
        },
        VarKind::Categorical { .. } => Ok(RawValue::Level(cell.to_string())),
    }
}
