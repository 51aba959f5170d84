//! Fall-incident prediction pipeline for heavily imbalanced clinical-style
//! tabular data.
//!
//! The crate covers the full experimental loop: a mixed-type data model with
//! dummy coding, three imbalance resamplers, four from-scratch binary
//! classifiers, confusion-matrix metrics, per-variable screening, a calibrated
//! synthetic dataset generator, and an experiment harness that renders the
//! result tables. Everything is a pure function of `(input, seed)` so repeated
//! runs reproduce reports byte for byte.

pub mod classifiers;
pub mod data;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod resample;
pub mod rng;
pub mod screening;
pub mod synth;

pub use error::{Error, Result};
