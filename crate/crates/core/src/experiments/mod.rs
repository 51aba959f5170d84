//! End-to-end experiment runs and their result tables.
//!
//! Three experiments share one synthetic-or-CSV data source and a master
//! seed. Every randomized sub-task draws from a stream derived from
//! `(master seed, task tag)`, so reports are pure functions of the
//! configuration and reproduce byte-for-byte.

mod report;

pub use report::{emit_report, format_cell, round_half_up_4, Cell, Report, ReportFormat, ReportRow};

use rayon::prelude::*;

use crate::classifiers::{train, AlgoId, Hyperparams, TrainedModel};
use crate::data::{load_csv, split_minority_first, split_random, Dataset, Schema, SplitPair};
use crate::error::{Error, Result};
use crate::metrics::{confusion, evaluate, recall, ConfusionMatrix};
use crate::resample::ResampleStrategy;
use crate::rng::derive_seed;
use crate::screening::{screen_variable, ScreenResample, ScreeningRow};
use crate::synth::{generate, GeneratorProfile};

/// Where the experiment data comes from.
#[derive(Debug, Clone)]
pub enum DataSource {
    Csv { data: std::path::PathBuf, schema: std::path::PathBuf },
    Synth { name: String, profile: GeneratorProfile, scale: f64 },
}

impl DataSource {
    pub fn synth(name: impl Into<String>, profile: GeneratorProfile, scale: f64) -> Self {
        DataSource::Synth { name: name.into(), profile, scale }
    }

    fn describe(&self) -> String {
        match self {
            DataSource::Csv { data, schema } => {
                format!("csv {} (schema {})", data.display(), schema.display())
            }
            DataSource::Synth { name, scale, .. } => {
                format!("synthetic {name} scale={scale}")
            }
        }
    }
}

/// Shared configuration of the three experiment runs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub seed: u64,
    pub train_fraction: f64,
    pub algos: Vec<AlgoId>,
    pub strategies: Vec<ResampleStrategy>,
    pub hyperparams: Hyperparams,
    pub screen_resample: ScreenResample,
    /// Split before undersampling in experiment 1 instead of the default
    /// undersample-then-split order.
    pub split_first: bool,
}

impl ExperimentConfig {
    pub fn new(source: DataSource, seed: u64) -> Self {
        ExperimentConfig {
            source,
            seed,
            train_fraction: 0.9,
            algos: AlgoId::ALL.to_vec(),
            strategies: vec![
                ResampleStrategy::RandomUnderSample,
                ResampleStrategy::StatisticalOverSample,
                ResampleStrategy::Smote { k: crate::resample::DEFAULT_SMOTE_K },
            ],
            hyperparams: Hyperparams::default(),
            screen_resample: ScreenResample::Rus,
            split_first: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Argument(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        if self.algos.is_empty() {
            return Err(Error::Argument("algorithm set is empty".into()));
        }
        self.hyperparams.validate()
    }

    /// Materialize the configured data source. Synthetic data is keyed by a
    /// stream derived from the master seed, so all three experiments see the
    /// same table for the same configuration.
    pub fn load_source(&self) -> Result<Dataset> {
        match &self.source {
            DataSource::Csv { data, schema } => {
                let text = std::fs::read_to_string(schema)?;
                let schema = Schema::from_json(&text)?;
                load_csv(data, &schema)
            }
            DataSource::Synth { profile, scale, .. } => {
                generate(profile, *scale, derive_seed(self.seed, "synth-data"))
            }
        }
    }
}

/// One concrete training task (k-NN expands to one task per k).
struct AlgoTask {
    algo: AlgoId,
    hp: Hyperparams,
    display: String,
    tag: String,
    is_knn: bool,
}

fn expand_tasks(algos: &[AlgoId], hp: &Hyperparams) -> Vec<AlgoTask> {
    let mut tasks = Vec::new();
    for &algo in algos {
        match algo {
            AlgoId::Knn => {
                for k in 1..=4 {
                    tasks.push(AlgoTask {
                        algo,
                        hp: hp.with_knn_k(k),
                        display: format!("k-nearest neighbor (k={k})"),
                        tag: format!("knn{k}"),
                        is_knn: true,
                    });
                }
            }
            _ => tasks.push(AlgoTask {
                algo,
                hp: *hp,
                display: algo.display_name().to_string(),
                tag: match algo {
                    AlgoId::Svm => "svm".into(),
                    AlgoId::LogReg => "logreg".into(),
                    AlgoId::Gbm => "gbm".into(),
                    AlgoId::Knn => unreachable!(),
                },
                is_knn: false,
            }),
        }
    }
    tasks
}

/// Index of the best k-NN row by test recall (ties to the lower k), used for
/// the `*` marker and as the k-NN representative in mean rows.
fn best_knn_index<T, F: Fn(&T) -> f64>(
    tasks: &[AlgoTask],
    results: &[Result<T>],
    recall_of: F,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, task) in tasks.iter().enumerate() {
        if !task.is_knn {
            continue;
        }
        if let Ok(v) = &results[i] {
            let r = recall_of(v);
            if best.map(|(_, b)| r > b).unwrap_or(true) {
                best = Some((i, r));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn common_footer(cfg: &ExperimentConfig, data: &Dataset) -> Vec<(String, String)> {
    let counts = data.class_counts();
    vec![
        ("seed".into(), cfg.seed.to_string()),
        ("source".into(), cfg.source.describe()),
        (
            "class counts".into(),
            format!("positives={} negatives={}", counts.positives, counts.negatives),
        ),
        ("data fingerprint".into(), data.fingerprint()),
    ]
}

/// Experiment 1: undersample to balance, split 90/10, train every
/// algorithm, report train/test accuracy and test recall.
pub fn run_experiment1(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let data = cfg.load_source()?;
    let pair = if cfg.split_first {
        let p = split_random(&data, cfg.train_fraction, derive_seed(cfg.seed, "exp1-split"))?;
        let train_half =
            crate::resample::undersample(&p.train, derive_seed(cfg.seed, "exp1-undersample"))?;
        SplitPair { train: train_half, test: p.test }
    } else {
        let balanced =
            crate::resample::undersample(&data, derive_seed(cfg.seed, "exp1-undersample"))?;
        split_random(&balanced, cfg.train_fraction, derive_seed(cfg.seed, "exp1-split"))?
    };

    let tasks = expand_tasks(&cfg.algos, &cfg.hyperparams);
    let results: Vec<Result<crate::metrics::EvalRecord>> = tasks
        .par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, &format!("exp1-train-{}", t.tag));
            train(t.algo, &pair.train, &t.hp, seed).and_then(|m| evaluate(&m, &pair))
        })
        .collect();
    let best_knn = best_knn_index(&tasks, &results, |r: &crate::metrics::EvalRecord| {
        r.recall_test
    });

    let mut rows = Vec::new();
    for (i, (task, result)) in tasks.iter().zip(&results).enumerate() {
        let mut name = task.display.clone();
        if Some(i) == best_knn {
            name.push_str(" *");
        }
        match result {
            Ok(r) => rows.push(ReportRow::new(vec![
                Cell::Text(name),
                Cell::Number(r.accuracy_train),
                Cell::Number(r.accuracy_test),
                Cell::Number(r.recall_test),
            ])),
            Err(e) => rows.push(ReportRow::new(vec![
                Cell::Text(name),
                Cell::Text(format!("error: {e}")),
                Cell::Empty,
                Cell::Empty,
            ])),
        }
    }

    let mut footer = common_footer(cfg, &data);
    footer.push((
        "order".into(),
        if cfg.split_first { "split-then-undersample".into() } else { "undersample-then-split".into() },
    ));
    footer.push((
        "train/test rows".into(),
        format!("{}/{}", pair.train.n_rows(), pair.test.n_rows()),
    ));
    if best_knn.is_some() {
        footer.push(("note".into(), "* k-NN row with the highest test recall".into()));
    }
    Ok(Report {
        id: "exp1_metrics".into(),
        columns: vec![
            "ML Algorithm".into(),
            "Accuracy (training)".into(),
            "Accuracy (testing)".into(),
            "Recall".into(),
        ],
        rows,
        footer,
    })
}

/// Experiment 2: split minority-first once, then per strategy resample the
/// training half, train every algorithm, and evaluate all of them on the one
/// shared untouched test set.
pub fn run_experiment2(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    cfg.validate()?;
    if cfg.strategies.is_empty() {
        return Err(Error::Argument("strategy set is empty".into()));
    }
    let data = cfg.load_source()?;
    let (minority, majority) =
        split_minority_first(&data, cfg.train_fraction, derive_seed(cfg.seed, "exp2-split"))?;
    // The test set exists before any resampling and is shared by all
    // strategy reports; trainers only ever see the resampled training half.
    let train_base = Dataset::concat(&[&minority.train, &majority.train])?;
    let test = Dataset::concat(&[&minority.test, &majority.test])?;

    let tasks = expand_tasks(&cfg.algos, &cfg.hyperparams);
    let mut reports = Vec::with_capacity(cfg.strategies.len());
    for strategy in &cfg.strategies {
        let flag = strategy.flag_name();
        let resampled =
            strategy.apply(&train_base, derive_seed(cfg.seed, &format!("exp2-resample-{flag}")))?;

        let results: Vec<Result<(f64, ConfusionMatrix)>> = tasks
            .par_iter()
            .map(|t| {
                let seed = derive_seed(cfg.seed, &format!("exp2-{flag}-train-{}", t.tag));
                let model: TrainedModel = train(t.algo, &resampled, &t.hp, seed)?;
                let predicted = model.predict_batch(&test)?;
                let cm = confusion(&predicted, test.labels())?;
                Ok((recall(&cm)?, cm))
            })
            .collect();
        let best_knn = best_knn_index(&tasks, &results, |(r, _)| *r);

        let mut rows = Vec::new();
        for (i, (task, result)) in tasks.iter().zip(&results).enumerate() {
            let mut name = task.display.clone();
            if Some(i) == best_knn {
                name.push_str(" *");
            }
            match result {
                Ok((r, cm)) => rows.push(ReportRow::new(vec![
                    Cell::Text(name),
                    Cell::Number(*r),
                    Cell::Count(cm.tn),
                    Cell::Count(cm.fp),
                    Cell::Count(cm.fn_),
                    Cell::Count(cm.tp),
                ])),
                Err(e) => rows.push(ReportRow::new(vec![
                    Cell::Text(name),
                    Cell::Text(format!("error: {e}")),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ])),
            }
        }

        // Mean over one representative row per configured algorithm; the
        // best-k row stands in for k-NN.
        let mut reps: Vec<usize> = Vec::new();
        for (i, task) in tasks.iter().enumerate() {
            if task.is_knn {
                if Some(i) == best_knn {
                    reps.push(i);
                }
            } else if results[i].is_ok() {
                reps.push(i);
            }
        }
        if !reps.is_empty() {
            let m = reps.len() as f64;
            let mean_of = |f: &dyn Fn(&(f64, ConfusionMatrix)) -> f64| -> f64 {
                reps.iter().map(|&i| f(results[i].as_ref().unwrap())).sum::<f64>() / m
            };
            rows.push(ReportRow::new(vec![
                Cell::Text("Mean".into()),
                Cell::Number(mean_of(&|(r, _)| *r)),
                Cell::Number(mean_of(&|(_, cm)| cm.tn as f64)),
                Cell::Number(mean_of(&|(_, cm)| cm.fp as f64)),
                Cell::Number(mean_of(&|(_, cm)| cm.fn_ as f64)),
                Cell::Number(mean_of(&|(_, cm)| cm.tp as f64)),
            ]));
        }

        let mut footer = common_footer(cfg, &data);
        footer.push(("strategy".into(), strategy.display_name()));
        footer.push((
            "train/test rows".into(),
            format!("{}/{}", resampled.n_rows(), test.n_rows()),
        ));
        footer.push(("test fingerprint".into(), test.fingerprint()));
        if best_knn.is_some() {
            footer.push(("note".into(), "* k-NN row with the highest test recall".into()));
        }
        footer.push((
            "mean".into(),
            "column-wise mean over one row per algorithm (best k-NN row)".into(),
        ));
        reports.push(Report {
            id: format!("exp2_{}", sanitize(&flag)),
            columns: vec![
                "ML Algorithm".into(),
                "Recall".into(),
                "TN".into(),
                "FP".into(),
                "FN".into(),
                "TP".into(),
            ],
            rows,
            footer,
        });
    }
    Ok(reports)
}

/// Screen every encoded column with the configured algorithms. Rows come
/// back in schema column order regardless of scheduling.
pub fn screen_all(cfg: &ExperimentConfig) -> Result<(Dataset, Vec<ScreeningRow>)> {
    cfg.validate()?;
    let data = cfg.load_source()?;
    let counts = data.class_counts();
    if counts.positives == 0 || counts.negatives == 0 {
        return Err(Error::DegenerateClass("screening needs both classes".into()));
    }
    let names: Vec<String> =
        data.columns().iter().map(|c| c.name.clone()).collect();
    let rows: Result<Vec<ScreeningRow>> = names
        .par_iter()
        .map(|name| {
            screen_variable(
                &data,
                name,
                &cfg.algos,
                &cfg.hyperparams,
                cfg.screen_resample,
                derive_seed(cfg.seed, &format!("exp3-var-{name}")),
            )
        })
        .collect();
    Ok((data, rows?))
}

/// Experiment 3: one screening row per variable; rows passing the guideline
/// (recall > 0.8 and precision > 0.013) are flagged as selected. Degenerate
/// rows carry a `*` marker on the variable name.
pub fn run_experiment3(cfg: &ExperimentConfig) -> Result<Report> {
    let (data, screening_rows) = screen_all(cfg)?;
    let mut rows = Vec::with_capacity(screening_rows.len());
    for r in &screening_rows {
        let mut name = r.variable.clone();
        if r.degenerate {
            name.push_str(" *");
        }
        let mut row = ReportRow::new(vec![
            Cell::Text(name),
            Cell::Number(r.best_recall),
            Cell::Number(r.best_precision),
            Cell::Number(r.correlation),
            Cell::Number(r.stats.mean_all),
            Cell::Number(r.stats.median_all),
            Cell::Number(r.stats.mean_fall),
            Cell::Number(r.stats.median_fall),
            Cell::Number(r.stats.mean_nofall),
            Cell::Number(r.stats.median_nofall),
        ]);
        row.selected = r.passes_guideline();
        rows.push(row);
    }

    let mut footer = common_footer(cfg, &data);
    footer.push((
        "screen resample".into(),
        match cfg.screen_resample {
            ScreenResample::Rus => "rus".into(),
            ScreenResample::None => "none".into(),
        },
    ));
    footer.push(("guideline".into(), "recall > 0.8 and precision > 0.013".into()));
    footer.push(("note".into(), "* degenerate variable (constant or unmodellable)".into()));
    Ok(Report {
        id: "exp3_screening_full".into(),
        columns: vec![
            "Explanatory Variable".into(),
            "Recall".into(),
            "Prec.".into(),
            "Corr.".into(),
            "Mean: all".into(),
            "Median: all".into(),
            "Mean: fo".into(),
            "Median: fo".into(),
            "Mean: no fo".into(),
            "Median: no fo".into(),
        ],
        rows,
        footer,
    })
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}
