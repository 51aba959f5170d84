//! Gradient boosting machine for binary log-loss.
//!
//! The base score is the training log-odds `ln(p/(1-p))`. Each stage fits a
//! depth-limited regression tree to the negative gradient (`y - p`) using
//! exact greedy variance-reduction splits over sorted unique feature values,
//! then adds `learning_rate * tree` to the raw score. Leaf values are the
//! one-step Newton estimate `sum(y - p) / sum(p (1 - p))` over the leaf.
//! Predictions threshold the sigmoid of the raw score at 0.5.

use serde::{Deserialize, Serialize};

use super::logreg::sigmoid;
use super::{require_both_classes, Hyperparams, TrainedModel};
use crate::data::Dataset;
use crate::error::Result;

/// Gains this small are indistinguishable from float noise on a constant
/// residual vector; such splits are not taken.
const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { value: f64 },
}

/// One regression tree, nodes in an arena with the root at index 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if row[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbmModel {
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    pub schema_fingerprint: String,
}

impl GbmModel {
    /// Raw (pre-sigmoid) score.
    pub fn score(&self, row: &[f64]) -> f64 {
        let mut s = self.base_score;
        for tree in &self.trees {
            s += self.learning_rate * tree.predict(row);
        }
        s
    }

    pub fn probability(&self, row: &[f64]) -> f64 {
        sigmoid(self.score(row))
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        (self.score(row) > 0.0) as u8
    }
}

pub fn train_gbm(train: &Dataset, hp: &Hyperparams) -> Result<TrainedModel> {
    hp.validate()?;
    require_both_classes(train, "gradient boosting")?;

    let n = train.n_rows();
    let width = train.width();
    let counts = train.class_counts();
    let p = counts.positives as f64 / n as f64;
    let base_score = (p / (1.0 - p)).ln();

    // Row order per feature, sorted by value then row index; computed once
    // and shared by every stage.
    let sorted: Vec<Vec<u32>> = (0..width)
        .map(|j| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| {
                train.row(a as usize)[j]
                    .total_cmp(&train.row(b as usize)[j])
                    .then(a.cmp(&b))
            });
            idx
        })
        .collect();

    let mut scores = vec![base_score; n];
    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];
    let mut trees = Vec::with_capacity(hp.gbm.stages);
    for _ in 0..hp.gbm.stages {
        for i in 0..n {
            let pi = sigmoid(scores[i]);
            residual[i] = train.label(i) as f64 - pi;
            hessian[i] = pi * (1.0 - pi);
        }
        let tree = fit_tree(
            train,
            &sorted,
            &residual,
            &hessian,
            hp.gbm.max_depth,
            hp.gbm.min_rows_per_leaf,
        );
        for i in 0..n {
            scores[i] += hp.gbm.learning_rate * tree.predict(train.row(i));
        }
        trees.push(tree);
    }

    Ok(TrainedModel::Gbm(GbmModel {
        base_score,
        learning_rate: hp.gbm.learning_rate,
        trees,
        schema_fingerprint: train.schema().fingerprint(),
    }))
}

#[derive(Clone, Copy, Default)]
struct NodeStats {
    count: usize,
    sum_r: f64,
    sum_h: f64,
}

#[derive(Clone, Copy)]
struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Level-wise exact greedy fit. Candidate thresholds sit between consecutive
/// distinct values within a node; among equal gains the lowest feature index
/// and then the lowest threshold wins.
fn fit_tree(
    data: &Dataset,
    sorted: &[Vec<u32>],
    residual: &[f64],
    hessian: &[f64],
    max_depth: usize,
    min_leaf: usize,
) -> Tree {
    let n = data.n_rows();
    let mut nodes: Vec<TreeNode> = vec![TreeNode::Leaf { value: 0.0 }];
    let mut assign: Vec<u32> = vec![0; n];
    let mut level: Vec<usize> = vec![0];

    for depth in 0..=max_depth {
        if level.is_empty() {
            break;
        }
        // slot lookup for nodes on this level
        let mut slot_of: Vec<Option<usize>> = vec![None; nodes.len()];
        for (slot, &id) in level.iter().enumerate() {
            slot_of[id] = Some(slot);
        }
        let mut stats = vec![NodeStats::default(); level.len()];
        for i in 0..n {
            if let Some(slot) = slot_of[assign[i] as usize] {
                stats[slot].count += 1;
                stats[slot].sum_r += residual[i];
                stats[slot].sum_h += hessian[i];
            }
        }

        let at_depth_limit = depth == max_depth;
        let mut best: Vec<Option<BestSplit>> = vec![None; level.len()];
        if !at_depth_limit {
            scan_splits(data, sorted, residual, &assign, &slot_of, &stats, min_leaf, &mut best);
        }

        let mut next_level = Vec::new();
        for (slot, &id) in level.iter().enumerate() {
            match best[slot] {
                Some(b) => {
                    let left = nodes.len();
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    let right = nodes.len();
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    nodes[id] = TreeNode::Split {
                        feature: b.feature,
                        threshold: b.threshold,
                        left,
                        right,
                    };
                    next_level.push(left);
                    next_level.push(right);
                }
                None => {
                    let s = stats[slot];
                    nodes[id] = TreeNode::Leaf { value: s.sum_r / s.sum_h.max(1e-12) };
                }
            }
        }

        // route rows of split nodes to their children
        if !next_level.is_empty() {
            for i in 0..n {
                let id = assign[i] as usize;
                if slot_of[id].is_some() {
                    if let TreeNode::Split { feature, threshold, left, right } = nodes[id] {
                        assign[i] =
                            if data.row(i)[feature] < threshold { left } else { right } as u32;
                    }
                }
            }
        }
        level = next_level;
    }

    Tree { nodes }
}

#[allow(clippy::too_many_arguments)]
fn scan_splits(
    data: &Dataset,
    sorted: &[Vec<u32>],
    residual: &[f64],
    assign: &[u32],
    slot_of: &[Option<usize>],
    stats: &[NodeStats],
    min_leaf: usize,
    best: &mut [Option<BestSplit>],
) {
    #[derive(Clone, Copy, Default)]
    struct Acc {
        count: usize,
        sum_r: f64,
        prev: f64,
    }
    let mut acc = vec![Acc::default(); stats.len()];
    for (feature, order) in sorted.iter().enumerate() {
        for a in acc.iter_mut() {
            *a = Acc::default();
        }
        for &ri in order {
            let i = ri as usize;
            let slot = match slot_of[assign[i] as usize] {
                Some(s) => s,
                None => continue,
            };
            let total = stats[slot];
            if total.count < 2 * min_leaf {
                continue;
            }
            let v = data.row(i)[feature];
            let a = &mut acc[slot];
            if a.count > 0 && v > a.prev {
                let left_n = a.count;
                let right_n = total.count - left_n;
                if left_n >= min_leaf && right_n >= min_leaf {
                    let left_s = a.sum_r;
                    let right_s = total.sum_r - left_s;
                    let gain = left_s * left_s / left_n as f64
                        + right_s * right_s / right_n as f64
                        - total.sum_r * total.sum_r / total.count as f64;
                    let current = best[slot].map(|b| b.gain).unwrap_or(GAIN_EPS);
                    if gain > current {
                        let mut threshold = a.prev + (v - a.prev) * 0.5;
                        if threshold <= a.prev {
                            threshold = v;
                        }
                        best[slot] = Some(BestSplit { gain, feature, threshold });
                    }
                }
            }
            a.count += 1;
            a.sum_r += residual[i];
            a.prev = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Schema, VariableSpec};
    use std::sync::Arc;

    fn dataset_1d(xs: &[f64], labels: &[u8]) -> Dataset {
        let schema =
            Arc::new(Schema::new(vec![VariableSpec::numeric("x")], "fall").unwrap());
        Dataset::new(schema, xs.to_vec(), labels.to_vec()).unwrap()
    }

    fn unwrap_gbm(model: TrainedModel) -> GbmModel {
        match model {
            TrainedModel::Gbm(m) => m,
            _ => unreachable!(),
        }
    }

    /// Exhaustive best-split search over all midpoints, same gain formula
    /// and tie rules as the trainer, written independently.
    fn brute_force_best_split(xs: &[f64], r: &[f64], min_leaf: usize) -> Option<(usize, f64)> {
        let n = xs.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
        let total: f64 = r.iter().sum();
        let mut best: Option<(f64, f64)> = None; // (gain, threshold)
        let mut left_sum = 0.0;
        for pos in 0..n - 1 {
            left_sum += r[order[pos]];
            let a = xs[order[pos]];
            let b = xs[order[pos + 1]];
            if b <= a {
                continue;
            }
            let ln = pos + 1;
            let rn = n - ln;
            if ln < min_leaf || rn < min_leaf {
                continue;
            }
            let rs = total - left_sum;
            let gain = left_sum * left_sum / ln as f64 + rs * rs / rn as f64
                - total * total / n as f64;
            let mut thr = a + (b - a) * 0.5;
            if thr <= a {
                thr = b;
            }
            if best.map(|(g, _)| gain > g).unwrap_or(gain > 1e-12) {
                best = Some((gain, thr));
            }
        }
        best.map(|(_, thr)| (0usize, thr))
    }

    #[test]
    fn zero_stages_predicts_the_majority_class() {
        let d = dataset_1d(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1, 0, 0, 0, 0]);
        let mut hp = Hyperparams::default();
        hp.gbm.stages = 0;
        let m = unwrap_gbm(train_gbm(&d, &hp).unwrap());
        assert!(m.trees.is_empty());
        let pred: Vec<u8> = d.rows().map(|r| m.predict_row(r)).collect();
        assert_eq!(pred, vec![0; 5]);
    }

    #[test]
    fn balanced_training_set_has_base_score_zero() {
        let d = dataset_1d(&[1.0, 2.0, 3.0, 4.0], &[1, 1, 0, 0]);
        let m = unwrap_gbm(train_gbm(&d, &Hyperparams::default()).unwrap());
        assert_eq!(m.base_score, 0.0);
    }

    #[test]
    fn base_score_is_the_log_odds() {
        let d = dataset_1d(&[1.0, 2.0, 3.0, 4.0], &[1, 0, 0, 0]);
        let m = unwrap_gbm(train_gbm(&d, &Hyperparams::default()).unwrap());
        assert_eq!(m.base_score, (0.25_f64 / 0.75).ln());
    }

    #[test]
    fn threshold_separable_data_fits_perfectly_and_matches_the_split_oracle() {
        let xs = [1.0, 2.0, 3.0, 4.0, 10.0, 11.0, 12.0, 13.0];
        let labels = [0, 0, 0, 0, 1, 1, 1, 1];
        let d = dataset_1d(&xs, &labels);
        let mut hp = Hyperparams::default();
        hp.gbm.max_depth = 1;
        hp.gbm.stages = 10;
        let m = unwrap_gbm(train_gbm(&d, &hp).unwrap());
        let pred: Vec<u8> = d.rows().map(|r| m.predict_row(r)).collect();
        assert_eq!(pred, labels.to_vec());

        // stage-1 residuals are y - 1/2; the root split must equal the
        // brute-force optimum
        let r: Vec<f64> = labels.iter().map(|&l| l as f64 - 0.5).collect();
        let (_, oracle_thr) =
            brute_force_best_split(&xs, &r, hp.gbm.min_rows_per_leaf).unwrap();
        match m.trees[0].nodes[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, oracle_thr);
            }
            _ => panic!("stage-1 tree did not split"),
        }
    }

    #[test]
    fn stage_one_split_matches_oracle_on_random_instances() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(314);
        for _ in 0..50 {
            let n = rng.gen_range(6..24);
            let xs: Vec<f64> =
                (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
            let mut labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            labels[0] = 1;
            labels[1] = 0;
            let d = dataset_1d(&xs, &labels);
            let mut hp = Hyperparams::default();
            hp.gbm.stages = 1;
            hp.gbm.max_depth = 1;
            let m = unwrap_gbm(train_gbm(&d, &hp).unwrap());
            let p = labels.iter().filter(|&&l| l == 1).count() as f64 / n as f64;
            let r: Vec<f64> = labels.iter().map(|&l| l as f64 - p).collect();
            let oracle = brute_force_best_split(&xs, &r, hp.gbm.min_rows_per_leaf);
            match (&m.trees[0].nodes[0], oracle) {
                (TreeNode::Split { threshold, .. }, Some((_, thr))) => {
                    assert_eq!(*threshold, thr)
                }
                (TreeNode::Leaf { .. }, None) => {}
                (node, oracle) => {
                    panic!("split {node:?} disagrees with oracle {oracle:?}")
                }
            }
        }
    }

    #[test]
    fn training_log_loss_never_increases_stage_over_stage() {
        let xs = [
            0.2, 0.8, 1.1, 1.9, 2.4, 3.0, 3.3, 4.1, 4.8, 5.5, 6.1, 6.9, 7.2, 8.0,
        ];
        let labels = [0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1];
        let d = dataset_1d(&xs, &labels);
        let mut hp = Hyperparams::default();
        hp.gbm.stages = 30;
        let m = unwrap_gbm(train_gbm(&d, &hp).unwrap());

        let log_loss = |scores: &[f64]| -> f64 {
            scores
                .iter()
                .zip(&labels)
                .map(|(&s, &l)| {
                    let p = sigmoid(s).clamp(1e-12, 1.0 - 1e-12);
                    if l == 1 {
                        -p.ln()
                    } else {
                        -(1.0 - p).ln()
                    }
                })
                .sum()
        };
        let mut scores = vec![m.base_score; xs.len()];
        let mut prev = log_loss(&scores);
        for tree in &m.trees {
            for (i, s) in scores.iter_mut().enumerate() {
                *s += m.learning_rate * tree.predict(d.row(i));
            }
            let cur = log_loss(&scores);
            assert!(cur <= prev + 1e-9, "loss rose from {prev} to {cur}");
            prev = cur;
        }
    }

    #[test]
    fn min_rows_per_leaf_is_respected() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let labels = [1, 0, 1, 0, 1, 0];
        let d = dataset_1d(&xs, &labels);
        let mut hp = Hyperparams::default();
        hp.gbm.stages = 5;
        hp.gbm.min_rows_per_leaf = 3;
        let m = unwrap_gbm(train_gbm(&d, &hp).unwrap());
        for tree in &m.trees {
            for node in &tree.nodes {
                if let TreeNode::Split { threshold, .. } = node {
                    let left = xs.iter().filter(|&&x| x < *threshold).count();
                    assert!(left >= 3 && xs.len() - left >= 3);
                }
            }
        }
    }

    #[test]
    fn training_is_deterministic() {
        let d = dataset_1d(
            &[0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5],
            &[0, 1, 0, 1, 1, 0, 1, 0],
        );
        let a = unwrap_gbm(train_gbm(&d, &Hyperparams::default()).unwrap());
        let b = unwrap_gbm(train_gbm(&d, &Hyperparams::default()).unwrap());
        assert_eq!(
            serde_json::to_string(&a.trees).unwrap(),
            serde_json::to_string(&b.trees).unwrap()
        );
    }
}
