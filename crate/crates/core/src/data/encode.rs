//! Dummy coding of raw mixed-type values into encoded rows.
//!
//! Numeric values pass through untouched (no normalization or any other
//! adjustment), binaries map to {0, 1}, and categorical values expand to a
//! full one-hot block with exactly one 1 among the level columns.

use super::schema::{Schema, VarKind};
use crate::error::{Error, Result};

/// A raw (pre-encoding) cell value.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Number(f64),
    Flag(bool),
    Level(String),
}

/// Encode one raw value per schema variable into a length-`w` vector.
pub fn dummy_encode(values: &[RawValue], schema: &Schema) -> Result<Vec<f64>> {
    if values.len() != schema.variables().len() {
        return Err(Error::Argument(format!(
            "got {} values for {} variables",
            values.len(),
            schema.variables().len()
        )));
    }
    let mut row = Vec::with_capacity(schema.encoded_width());
    for (value, var) in values.iter().zip(schema.variables()) {
        match (&var.kind, value) {
            (VarKind::Numeric, RawValue::Number(x)) => {
                if !x.is_finite() {
                    return Err(Error::Value(format!("non-finite value for '{}'", var.name)));
                }
                row.push(*x);
            }
            (VarKind::Binary, RawValue::Flag(b)) => row.push(if *b { 1.0 } else { 0.0 }),
            (VarKind::Categorical { levels }, RawValue::Level(l)) => {
                let hit = levels.iter().position(|cand| cand == l).ok_or_else(|| {
                    Error::Value(format!("unknown level '{l}' for '{}'", var.name))
                })?;
                for i in 0..levels.len() {
                    row.push(if i == hit { 1.0 } else { 0.0 });
                }
            }
            (_, got) => {
                return Err(Error::Value(format!(
                    "value {got:?} does not match the declared kind of '{}'",
                    var.name
                )));
            }
        }
    }
    Ok(row)
}

/// Invert `dummy_encode`. Fails when a one-hot block does not contain exactly
/// one 1.
pub fn decode_row(row: &[f64], schema: &Schema) -> Result<Vec<RawValue>> {
    if row.len() != schema.encoded_width() {
        return Err(Error::Argument(format!(
            "row has {} entries, schema encodes {}",
            row.len(),
            schema.encoded_width()
        )));
    }
    let mut out = Vec::with_capacity(schema.variables().len());
    let mut j = 0;
    for var in schema.variables() {
        match &var.kind {
            VarKind::Numeric => {
                out.push(RawValue::Number(row[j]));
                j += 1;
            }
            VarKind::Binary => {
                out.push(RawValue::Flag(row[j] == 1.0));
                j += 1;
            }
            VarKind::Categorical { levels } => {
                let block = &row[j..j + levels.len()];
                let ones: Vec<usize> =
                    (0..block.len()).filter(|&i| block[i] == 1.0).collect();
                if ones.len() != 1 {
                    return Err(Error::Value(format!(
                        "one-hot block of '{}' has {} set bits",
                        var.name,
                        ones.len()
                    )));
                }
                out.push(RawValue::Level(levels[ones[0]].clone()));
                j += levels.len();
            }
        }
    }
    Ok(out)
}
