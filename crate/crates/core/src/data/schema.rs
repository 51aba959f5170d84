//! Variable declarations and the encoded-column layout they induce.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Kind of a declared variable. Categorical variables carry their full,
/// ordered list of level names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VarKind {
    Numeric,
    Binary,
    Categorical { levels: Vec<String> },
}

/// One declared column of the raw table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: VarKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl VariableSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        VariableSpec { name: name.into(), kind: VarKind::Numeric, description: None }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        VariableSpec { name: name.into(), kind: VarKind::Binary, description: None }
    }

    pub fn categorical(name: impl Into<String>, levels: &[&str]) -> Self {
        VariableSpec {
            name: name.into(),
            kind: VarKind::Categorical { levels: levels.iter().map(|s| s.to_string()).collect() },
            description: None,
        }
    }

    /// Number of encoded columns this variable occupies (full one-hot for
    /// categorical variables: every level gets its own column so each level
    /// stays addressable as a standalone indicator).
    pub fn encoded_width(&self) -> usize {
        match &self.kind {
            VarKind::Numeric | VarKind::Binary => 1,
            VarKind::Categorical { levels } => levels.len(),
        }
    }
}

/// One column of the encoded matrix, mapping back to `(variable, level)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedColumn {
    /// Index of the source variable in `Schema::variables`.
    pub variable: usize,
    /// Level index for columns produced by a categorical variable.
    pub level: Option<usize>,
    /// Display name: the variable name, or `"variable=level"`.
    pub name: String,
    /// True for columns constrained to {0, 1} (binary or one-hot derived).
    pub indicator: bool,
}

/// Ordered variable list plus the designated binary outcome column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc", into = "SchemaDoc")]
pub struct Schema {
    variables: Vec<VariableSpec>,
    label_name: String,
    #[serde(skip)]
    columns: Vec<EncodedColumn>,
}

/// Wire form of a schema document: `{"variables": [...], "label_name": ...}`.
#[derive(Serialize, Deserialize)]
struct SchemaDoc {
    variables: Vec<VariableSpec>,
    label_name: String,
}

impl TryFrom<SchemaDoc> for Schema {
    type Error = Error;
    fn try_from(doc: SchemaDoc) -> Result<Self> {
        Schema::new(doc.variables, doc.label_name)
    }
}

impl From<Schema> for SchemaDoc {
    fn from(s: Schema) -> Self {
        SchemaDoc { variables: s.variables, label_name: s.label_name }
    }
}

impl Schema {
    /// Validate the declaration and precompute the encoded-column layout.
    pub fn new(variables: Vec<VariableSpec>, label_name: impl Into<String>) -> Result<Self> {
        let label_name = label_name.into();
        if label_name.is_empty() {
            return Err(Error::Schema("label name is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &variables {
            if v.name.is_empty() {
                return Err(Error::Schema("variable with empty name".into()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::Schema(format!("duplicate variable name '{}'", v.name)));
            }
            if v.name == label_name {
                return Err(Error::Schema(format!(
                    "variable '{}' collides with the label column",
                    v.name
                )));
            }
            if let VarKind::Categorical { levels } = &v.kind {
                if levels.len() < 2 {
                    return Err(Error::Schema(format!(
                        "categorical '{}' needs at least 2 levels",
                        v.name
                    )));
                }
                let mut level_seen = std::collections::HashSet::new();
                for l in levels {
                    if !level_seen.insert(l.as_str()) {
                        return Err(Error::Schema(format!(
                            "categorical '{}' has duplicate level '{}'",
                            v.name, l
                        )));
                    }
                }
            }
        }

        let mut columns = Vec::new();
        for (vi, v) in variables.iter().enumerate() {
            match &v.kind {
                VarKind::Numeric => columns.push(EncodedColumn {
                    variable: vi,
                    level: None,
                    name: v.name.clone(),
                    indicator: false,
                }),
                VarKind::Binary => columns.push(EncodedColumn {
                    variable: vi,
                    level: None,
                    name: v.name.clone(),
                    indicator: true,
                }),
                VarKind::Categorical { levels } => {
                    for (li, level) in levels.iter().enumerate() {
                        columns.push(EncodedColumn {
                            variable: vi,
                            level: Some(li),
                            name: format!("{}={}", v.name, level),
                            indicator: true,
                        });
                    }
                }
            }
        }
        Ok(Schema { variables, label_name, columns })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    /// Encoded matrix width.
    pub fn encoded_width(&self) -> usize {
        self.columns.len()
    }

    /// Encoded column layout, in declaration order.
    pub fn columns(&self) -> &[EncodedColumn] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Stable content hash of the declaration; models remember it and refuse
    /// inputs encoded under a different layout.
    pub fn fingerprint(&self) -> String {
        let doc = serde_json::to_vec(self).expect("schema serializes");
        let digest = Sha256::digest(&doc);
        hex(&digest)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
