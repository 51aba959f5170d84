//! Mixed-type tabular data: schema declaration, dummy coding, CSV loading
//! and the two train/test split procedures.

mod csv_io;
mod dataset;
mod encode;
mod schema;
mod split;

pub use csv_io::{load_csv, write_csv};
pub use dataset::{ClassCounts, Dataset};
pub use encode::{decode_row, dummy_encode, RawValue};
pub use schema::{EncodedColumn, Schema, VarKind, VariableSpec};
pub use split::{split_minority_first, split_random, SplitPair};
