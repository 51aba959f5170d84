//! Train/test splitting.
//!
//! `split_random` divides rows uniformly at random. `split_minority_first`
//! partitions each class independently so that later oversampling of the
//! minority training half can never leak synthetic redundancy into the test
//! set, and so the majority draw never perturbs the minority draw.

use rand::seq::index::sample;

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Disjoint train/test halves of one input dataset.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
}

/// Number of training rows for `n` rows at `fraction`: round half up,
/// remainder to test.
pub fn train_size(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Argument(format!(
            "train fraction {fraction} outside the open interval (0, 1)"
        )));
    }
    Ok(())
}

/// Uniform random split. The selection is a pure function of `seed`; row
/// order within each half follows the input.
pub fn split_random(data: &Dataset, fraction: f64, seed: u64) -> Result<SplitPair> {
    check_fraction(fraction)?;
    if data.n_rows() < 2 {
        return Err(Error::Argument(format!(
            "cannot split {} rows into two parts",
            data.n_rows()
        )));
    }
    let n = data.n_rows();
    let n_train = train_size(n, fraction);
    let mut rng = rng_from_seed(seed);
    let mut picked = sample(&mut rng, n, n_train).into_vec();
    picked.sort_unstable();
    let mut in_train = vec![false; n];
    for &i in &picked {
        in_train[i] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();
    Ok(SplitPair { train: data.select_rows(&picked), test: data.select_rows(&rest) })
}

/// Split the positive (fall) rows and the negative rows 90/10 independently.
/// Returns `(minority_pair, majority_pair)`; the experiment layer resamples
/// only the training halves and tests on `minority.test ∪ majority.test`.
pub fn split_minority_first(
    data: &Dataset,
    fraction: f64,
    seed: u64,
) -> Result<(SplitPair, SplitPair)> {
    check_fraction(fraction)?;
    let counts = data.class_counts();
    if counts.positives == 0 || counts.negatives == 0 {
        return Err(Error::DegenerateClass(format!(
            "minority-first split needs both classes, got {} positives and {} negatives",
            counts.positives, counts.negatives
        )));
    }
    let minority = data.select_rows(&data.indices_with_label(1));
    let majority = data.select_rows(&data.indices_with_label(0));
    let minority_pair = split_class(&minority, fraction, derive_seed(seed, "minority-split"))?;
    let majority_pair = split_class(&majority, fraction, derive_seed(seed, "majority-split"))?;
    Ok((minority_pair, majority_pair))
}

/// Same selection rule as `split_random`, but tolerates single-row classes
/// (the remainder rule may then leave one side empty).
fn split_class(data: &Dataset, fraction: f64, seed: u64) -> Result<SplitPair> {
    let n = data.n_rows();
    let n_train = train_size(n, fraction);
    let mut rng = rng_from_seed(seed);
    let mut picked = sample(&mut rng, n, n_train).into_vec();
    picked.sort_unstable();
    let mut in_train = vec![false; n];
    for &i in &picked {
        in_train[i] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();
    Ok(SplitPair { train: data.select_rows(&picked), test: data.select_rows(&rest) })
}
