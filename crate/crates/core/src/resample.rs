//! Imbalance handling: random undersampling, statistical oversampling, and
//! SMOTE. All three equalize the class counts of a *training* dataset, keep
//! every original minority row unchanged, and are pure functions of
//! `(input, parameters, seed)`.

use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub const DEFAULT_SMOTE_K: usize = 5;

/// Which preparation to apply to a training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleStrategy {
    RandomUnderSample,
    StatisticalOverSample,
    Smote { k: usize },
}

impl ResampleStrategy {
    pub fn apply(&self, train: &Dataset, seed: u64) -> Result<Dataset> {
        match self {
            ResampleStrategy::RandomUnderSample => undersample(train, seed),
            ResampleStrategy::StatisticalOverSample => oversample_stats(train, seed),
            ResampleStrategy::Smote { k } => smote(train, *k, seed),
        }
    }

    /// Flag value accepted by the CLI (`rus`, `ros-stats`, `smote[:k]`).
    pub fn flag_name(&self) -> String {
        match self {
            ResampleStrategy::RandomUnderSample => "rus".into(),
            ResampleStrategy::StatisticalOverSample => "ros-stats".into(),
            ResampleStrategy::Smote { k } => format!("smote:{k}"),
        }
    }

    pub fn display_name(&self) -> String {
        match self {
            ResampleStrategy::RandomUnderSample => "Random Under Sampling".into(),
            ResampleStrategy::StatisticalOverSample => {
                "Random Over Sampling (mean and variance)".into()
            }
            ResampleStrategy::Smote { k } => format!("SMOTE (k={k})"),
        }
    }
}

impl FromStr for ResampleStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rus" => Ok(ResampleStrategy::RandomUnderSample),
            "ros-stats" => Ok(ResampleStrategy::StatisticalOverSample),
            "smote" => Ok(ResampleStrategy::Smote { k: DEFAULT_SMOTE_K }),
            other => {
                if let Some(k_text) = other.strip_prefix("smote:") {
                    let k: usize = k_text.parse().map_err(|_| {
                        Error::Argument(format!("bad smote neighbor count '{k_text}'"))
                    })?;
                    if k == 0 {
                        return Err(Error::Argument("smote needs k >= 1".into()));
                    }
                    Ok(ResampleStrategy::Smote { k })
                } else {
                    Err(Error::Argument(format!(
                        "unknown strategy '{other}', expected rus | ros-stats | smote[:k]"
                    )))
                }
            }
        }
    }
}

/// Randomly drop majority rows until the classes are equal. Every minority
/// row survives unchanged; kept rows stay in input order.
pub fn undersample(train: &Dataset, seed: u64) -> Result<Dataset> {
    let counts = train.class_counts();
    if counts.positives == 0 {
        return Err(Error::DegenerateClass("undersample with zero positives".into()));
    }
    if counts.positives > counts.negatives {
        return Err(Error::DegenerateClass(format!(
            "undersample expects positives <= negatives, got {} > {}",
            counts.positives, counts.negatives
        )));
    }
    let negatives = train.indices_with_label(0);
    let mut rng = rng_from_seed(seed);
    let picked = sample(&mut rng, negatives.len(), counts.positives);
    let mut keep: Vec<usize> = train.indices_with_label(1);
    keep.extend(picked.iter().map(|i| negatives[i]));
    keep.sort_unstable();
    Ok(train.select_rows(&keep))
}

/// Per-column sampling law for the statistical oversampler.
enum ColumnLaw {
    Constant(f64),
    Gaussian(Normal<f64>),
    Indicator(f64),
}

/// Oversample the minority by drawing each encoded column independently:
/// numeric columns from a normal law with the minority column's mean and
/// population variance, indicator columns as 1-with-probability-equal-to-
/// the-column-mean. Appends synthetic minority rows until the classes match.
pub fn oversample_stats(train: &Dataset, seed: u64) -> Result<Dataset> {
    let counts = train.class_counts();
    if counts.positives < 2 {
        return Err(Error::DegenerateClass(format!(
            "statistical oversampling needs at least 2 minority rows, got {}",
            counts.positives
        )));
    }
    if counts.negatives < counts.positives {
        return Err(Error::DegenerateClass(format!(
            "statistical oversampling expects positives <= negatives, got {} > {}",
            counts.positives, counts.negatives
        )));
    }
    let minority = train.indices_with_label(1);
    let m = minority.len() as f64;
    let width = train.width();

    let mut laws = Vec::with_capacity(width);
    for (j, col) in train.columns().iter().enumerate() {
        let mean = minority.iter().map(|&i| train.row(i)[j]).sum::<f64>() / m;
        if col.indicator {
            laws.push(ColumnLaw::Indicator(mean));
        } else {
            let var = minority
                .iter()
                .map(|&i| {
                    let d = train.row(i)[j] - mean;
                    d * d
                })
                .sum::<f64>()
                / m;
            if var == 0.0 {
                laws.push(ColumnLaw::Constant(mean));
            } else {
                laws.push(ColumnLaw::Gaussian(
                    Normal::new(mean, var.sqrt()).expect("finite law"),
                ));
            }
        }
    }

    let missing = counts.negatives - counts.positives;
    let mut rng = rng_from_seed(seed);
    let mut rows = Vec::with_capacity(missing * width);
    for _ in 0..missing {
        for law in &laws {
            let v = match law {
                ColumnLaw::Constant(c) => *c,
                ColumnLaw::Gaussian(normal) => normal.sample(&mut rng),
                ColumnLaw::Indicator(p) => {
                    if rng.gen_bool(p.clamp(0.0, 1.0)) {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            rows.push(v);
        }
    }
    train.with_extra_rows(rows, vec![1; missing])
}

/// SMOTE: each synthetic row is `x + u (x' - x)` for a random minority row
/// `x`, one of its `k` nearest minority neighbors `x'` (Euclidean on encoded
/// columns) and `u ~ U[0,1]`. Indicator columns are rounded to the nearest of
/// {0, 1} after interpolation, ties to 1 (one-hot exclusivity is therefore
/// not guaranteed on synthetic rows). Appends rows until the classes match.
pub fn smote(train: &Dataset, k: usize, seed: u64) -> Result<Dataset> {
    let counts = train.class_counts();
    if k == 0 {
        return Err(Error::Argument("smote needs k >= 1".into()));
    }
    if counts.positives <= k {
        return Err(Error::Argument(format!(
            "smote needs more minority rows than neighbors, got {} rows for k={k}",
            counts.positives
        )));
    }
    if counts.negatives < counts.positives {
        return Err(Error::DegenerateClass(format!(
            "smote expects positives <= negatives, got {} > {}",
            counts.positives, counts.negatives
        )));
    }
    let minority = train.indices_with_label(1);
    let m = minority.len();
    let width = train.width();

    // k nearest minority neighbors per minority row; ties broken by lower
    // row position to keep the result independent of iteration details.
    let mut neighbors: Vec<Vec<usize>> = Vec::with_capacity(m);
    for a in 0..m {
        let mut dists: Vec<(f64, usize)> = (0..m)
            .filter(|&b| b != a)
            .map(|b| {
                let ra = train.row(minority[a]);
                let rb = train.row(minority[b]);
                let d2: f64 =
                    ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)).sum();
                (d2, b)
            })
            .collect();
        dists.sort_by(|l, r| l.0.total_cmp(&r.0).then(l.1.cmp(&r.1)));
        neighbors.push(dists.into_iter().take(k).map(|(_, b)| b).collect());
    }

    let missing = counts.negatives - counts.positives;
    let mut rng = rng_from_seed(seed);
    let indicator: Vec<bool> = train.columns().iter().map(|c| c.indicator).collect();
    let mut rows = Vec::with_capacity(missing * width);
    for _ in 0..missing {
        let a = rng.gen_range(0..m);
        let b = neighbors[a][rng.gen_range(0..k)];
        let u: f64 = rng.gen_range(0.0..=1.0);
        let ra = train.row(minority[a]);
        let rb = train.row(minority[b]);
        for j in 0..width {
            let mut v = ra[j] + u * (rb[j] - ra[j]);
            if indicator[j] {
                v = if v >= 0.5 { 1.0 } else { 0.0 };
            }
            rows.push(v);
        }
    }
    train.with_extra_rows(rows, vec![1; missing])
}
