//! Synthetic EMR-like dataset generator.
//!
//! A `GeneratorProfile` holds one class-conditional law per named variable
//! (normal for numerics, Bernoulli for binary indicators), the class counts,
//! and a count of filler indicator columns. Fillers stand in for the many
//! real-world variables whose statistics are unknown; they are generated as
//! inactive indicators (never set), which keeps them label-independent and
//! keeps any single-variable model built on them at or below the all-positive
//! precision baseline. Columns are drawn independently; no covariance
//! structure is modelled.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::data::{Dataset, Schema, VariableSpec};
use crate::error::{Error, Result};
use crate::rng::derive_rng;

/// Class-conditional sampling law for one variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum Law {
    Normal { mean: f64, sd: f64 },
    Bernoulli { p: f64 },
}

impl Law {
    fn is_binary(&self) -> bool {
        matches!(self, Law::Bernoulli { .. })
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            Law::Normal { mean, sd } => {
                if !mean.is_finite() || !sd.is_finite() || *sd < 0.0 {
                    return Err(Error::Value(format!("bad normal law for '{name}'")));
                }
            }
            Law::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Value(format!(
                        "bernoulli p for '{name}' must lie in [0, 1], got {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            Law::Normal { mean, sd } => {
                if *sd == 0.0 {
                    *mean
                } else {
                    Normal::new(*mean, *sd).expect("validated law").sample(rng)
                }
            }
            Law::Bernoulli { p } => {
                if rng.gen_bool(*p) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Calibration record for one named variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedVariable {
    pub name: String,
    pub fall: Law,
    pub nofall: Law,
    /// Plausible range clamp for numeric variables (e.g. age to [0, 120]).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<(f64, f64)>,
}

/// Full generator calibration: named variables, class counts, filler count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorProfile {
    pub variables: Vec<CalibratedVariable>,
    pub positives: usize,
    pub negatives: usize,
    pub fillers: usize,
}

impl GeneratorProfile {
    pub fn validate(&self) -> Result<()> {
        if self.positives == 0 || self.negatives == 0 {
            return Err(Error::Value("profile class counts must be >= 1".into()));
        }
        for v in &self.variables {
            v.fall.validate(&v.name)?;
            v.nofall.validate(&v.name)?;
            if v.fall.is_binary() != v.nofall.is_binary() {
                return Err(Error::Value(format!(
                    "'{}' mixes law kinds across classes",
                    v.name
                )));
            }
        }
        Ok(())
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len() + self.fillers
    }

    /// Schema of the generated table: named variables in profile order, then
    /// the filler indicators.
    pub fn schema(&self) -> Result<Schema> {
        let mut vars = Vec::with_capacity(self.variable_count());
        for v in &self.variables {
            if v.fall.is_binary() {
                vars.push(VariableSpec::binary(&v.name));
            } else {
                vars.push(VariableSpec::numeric(&v.name));
            }
        }
        for i in 0..self.fillers {
            vars.push(VariableSpec::binary(format!("filler_{:03}", i + 1)));
        }
        Schema::new(vars, "fall")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let profile: GeneratorProfile = serde_json::from_str(text)?;
        profile.validate()?;
        Ok(profile)
    }
}

/// The built-in `table-v` profile: class-conditional means of the screened
/// variables, class counts 1213 / 101986, and inactive fillers up to 172
/// variables. Normal standard deviations are calibration choices, not
/// measured values.
pub fn table_v_profile() -> GeneratorProfile {
    fn numeric(
        name: &str,
        fall_mean: f64,
        fall_sd: f64,
        nofall_mean: f64,
        nofall_sd: f64,
        clamp: (f64, f64),
    ) -> CalibratedVariable {
        CalibratedVariable {
            name: name.into(),
            fall: Law::Normal { mean: fall_mean, sd: fall_sd },
            nofall: Law::Normal { mean: nofall_mean, sd: nofall_sd },
            clamp: Some(clamp),
        }
    }
    fn binary(name: &str, fall_p: f64, nofall_p: f64) -> CalibratedVariable {
        CalibratedVariable {
            name: name.into(),
            fall: Law::Bernoulli { p: fall_p },
            nofall: Law::Bernoulli { p: nofall_p },
            clamp: None,
        }
    }

    let variables = vec![
        numeric("Patient age", 68.3, 12.0, 56.8, 18.0, (0.0, 120.0)),
        numeric("Patient #mo", 825.4, 140.0, 687.5, 200.0, (0.0, 2000.0)),
        numeric("Patient height", 156.0, 10.0, 152.7, 10.0, (50.0, 220.0)),
        binary("Gynecology", 0.022, 0.0998),
        binary("Cardiology", 0.0643, 0.0808),
        binary("Ophthalmology", 0.0173, 0.0873),
        binary("Anesthesia period > average", 0.0791, 0.1489),
        binary("Operation period > average", 0.1104, 0.1969),
        binary("Plan A-1", 0.0832, 0.2636),
        binary("Autonomy", 0.0799, 0.2517),
        binary("AAA medication", 0.0676, 0.0800),
        binary("Check-up purpose", 0.0535, 0.1100),
        binary("ER planned", 0.0519, 0.0677),
        binary("Visual impairment", 0.2464, 0.2131),
    ];
    let fillers = 172 - variables.len();
    GeneratorProfile { variables, positives: 1213, negatives: 101_986, fillers }
}

/// Generate `round(scale * counts)` rows per class — fall rows first, then
/// no-fall rows. Each row draws from its own counter-derived RNG stream, so
/// the output is bit-reproducible and independent of worker count.
pub fn generate(profile: &GeneratorProfile, scale: f64, seed: u64) -> Result<Dataset> {
    profile.validate()?;
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::Argument(format!("scale {scale} outside (0, 1]")));
    }
    let positives = (scale * profile.positives as f64).round() as usize;
    let negatives = (scale * profile.negatives as f64).round() as usize;
    if positives < 2 || negatives < 2 {
        return Err(Error::Argument(format!(
            "scale {scale} leaves a class with fewer than 2 rows ({positives} / {negatives})"
        )));
    }

    let schema = Arc::new(profile.schema()?);
    let width = schema.encoded_width();
    let n = positives + negatives;
    let master = derive_rng(seed, "synth-rows");

    let mut values = vec![0.0; n * width];
    values
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(row, out)| {
            let mut rng = master.clone();
            rng.set_stream(row as u64);
            let fall = row < positives;
            for (j, var) in profile.variables.iter().enumerate() {
                let law = if fall { &var.fall } else { &var.nofall };
                let mut v = law.sample(&mut rng);
                if let Some((lo, hi)) = var.clamp {
                    v = v.clamp(lo, hi);
                }
                out[j] = v;
            }
            // filler indicators stay 0
        });

    let mut labels = vec![1u8; positives];
    labels.extend(std::iter::repeat(0u8).take(negatives));
    Dataset::new(schema, values, labels)
}
