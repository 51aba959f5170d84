//! `incident-bench`: run the fall-incident prediction experiments and the
//! synthetic data generator from the command line.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on data errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use incident_core::classifiers::AlgoId;
use incident_core::data::write_csv;
use incident_core::error::Error;
use incident_core::experiments::{
    emit_report, run_experiment1, run_experiment2, run_experiment3, DataSource,
    ExperimentConfig, Report, ReportFormat,
};
use incident_core::resample::ResampleStrategy;
use incident_core::rng::derive_seed;
use incident_core::screening::ScreenResample;
use incident_core::synth::{generate, table_v_profile, GeneratorProfile};

#[derive(Parser)]
#[command(name = "incident-bench", version, about = "Fall-incident prediction benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Algorithm comparison on an undersampled balanced dataset.
    Exp1(Exp1Args),
    /// Resampling-strategy comparison with a shared minority-first test set.
    Exp2(Exp2Args),
    /// Single-variable screening of every encoded column.
    Exp3(Exp3Args),
    /// Generate a synthetic dataset and its schema.
    Synth(SynthArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// CSV data file (use together with --schema).
    #[arg(long, requires = "schema", conflicts_with = "synth")]
    data: Option<PathBuf>,
    /// Schema JSON describing the CSV columns.
    #[arg(long, requires = "data")]
    schema: Option<PathBuf>,
    /// Built-in synthetic profile (`table-v`).
    #[arg(long)]
    synth: Option<String>,
    /// Scale of the synthetic dataset, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Args)]
struct CommonArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Master seed; every randomized sub-task derives its own stream.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for report files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Report format: csv | md.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Comma-separated algorithms: svm,logreg,gbm,knn.
    #[arg(long, default_value = "svm,logreg,gbm,knn")]
    algos: String,
    /// Training fraction of each split.
    #[arg(long, default_value_t = 0.9)]
    train_fraction: f64,
}

#[derive(Args)]
struct Exp1Args {
    #[command(flatten)]
    common: CommonArgs,
    /// Split 90/10 first and undersample only the training half (the default
    /// order undersamples the whole dataset before splitting).
    #[arg(long)]
    split_first: bool,
}

#[derive(Args)]
struct Exp2Args {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated strategies: rus | ros-stats | smote[:k].
    #[arg(long, default_value = "rus,ros-stats,smote")]
    strategies: String,
}

#[derive(Args)]
struct Exp3Args {
    #[command(flatten)]
    common: CommonArgs,
    /// Training preparation inside the per-variable loop: rus | none.
    #[arg(long, default_value = "rus")]
    screen_resample: String,
}

#[derive(Args)]
struct SynthArgs {
    /// Built-in profile name (`table-v`).
    #[arg(long, default_value = "table-v")]
    profile: String,
    /// JSON profile document overriding the built-in one.
    #[arg(long)]
    profile_json: Option<PathBuf>,
    /// Scale of the generated dataset, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path.
    #[arg(long, default_value = "data.csv")]
    out: PathBuf,
    /// Output schema JSON path.
    #[arg(long, default_value = "schema.json")]
    schema_out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exp1(args) => run_exp1(args),
        Command::Exp2(args) => run_exp2(args),
        Command::Exp3(args) => run_exp3(args),
        Command::Synth(args) => run_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 2 for configuration problems, 3 for anything rooted in the data.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Argument(_) => 2,
        _ => 3,
    }
}

fn parse_profile(name: &str) -> Result<GeneratorProfile, Error> {
    match name {
        "table-v" => Ok(table_v_profile()),
        other => Err(Error::Argument(format!(
            "unknown synthetic profile '{other}', expected table-v"
        ))),
    }
}

fn parse_algos(text: &str) -> Result<Vec<AlgoId>, Error> {
    let mut algos = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let algo: AlgoId = part.parse()?;
        if !algos.contains(&algo) {
            algos.push(algo);
        }
    }
    if algos.is_empty() {
        return Err(Error::Argument("algorithm set is empty".into()));
    }
    Ok(algos)
}

fn parse_strategies(text: &str) -> Result<Vec<ResampleStrategy>, Error> {
    let mut strategies = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let strategy: ResampleStrategy = part.parse()?;
        if !strategies.contains(&strategy) {
            strategies.push(strategy);
        }
    }
    if strategies.is_empty() {
        return Err(Error::Argument("strategy set is empty".into()));
    }
    Ok(strategies)
}

fn build_config(common: &CommonArgs) -> Result<(ExperimentConfig, ReportFormat), Error> {
    let source = match (&common.source.data, &common.source.schema, &common.source.synth) {
        (Some(data), Some(schema), None) => {
            DataSource::Csv { data: data.clone(), schema: schema.clone() }
        }
        (None, None, Some(name)) => {
            if !(common.source.scale > 0.0 && common.source.scale <= 1.0) {
                return Err(Error::Argument(format!(
                    "scale {} outside (0, 1]",
                    common.source.scale
                )));
            }
            DataSource::synth(name.clone(), parse_profile(name)?, common.source.scale)
        }
        _ => {
            return Err(Error::Argument(
                "pick one data source: --data PATH --schema PATH, or --synth table-v".into(),
            ))
        }
    };
    let format: ReportFormat = common.format.parse()?;
    let mut cfg = ExperimentConfig::new(source, common.seed);
    cfg.train_fraction = common.train_fraction;
    cfg.algos = parse_algos(&common.algos)?;
    Ok((cfg, format))
}

fn emit(report: &Report, format: ReportFormat, dir: &PathBuf) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let path = emit_report(report, format, dir)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_exp1(args: Exp1Args) -> Result<(), Error> {
    let (mut cfg, format) = build_config(&args.common)?;
    cfg.split_first = args.split_first;
    let report = run_experiment1(&cfg)?;
    emit(&report, format, &args.common.out)
}

fn run_exp2(args: Exp2Args) -> Result<(), Error> {
    let (mut cfg, format) = build_config(&args.common)?;
    cfg.strategies = parse_strategies(&args.strategies)?;
    for report in run_experiment2(&cfg)? {
        emit(&report, format, &args.common.out)?;
    }
    Ok(())
}

fn run_exp3(args: Exp3Args) -> Result<(), Error> {
    let (mut cfg, format) = build_config(&args.common)?;
    cfg.screen_resample = args.screen_resample.parse::<ScreenResample>()?;
    let report = run_experiment3(&cfg)?;
    emit(&report, format, &args.common.out)?;
    let selected = report.selected_only("exp3_screening_selected");
    emit(&selected, format, &args.common.out)
}

fn run_synth(args: SynthArgs) -> Result<(), Error> {
    let profile = match &args.profile_json {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            GeneratorProfile::from_json(&text)?
        }
        None => parse_profile(&args.profile)?,
    };
    // Same derivation as the experiment runner, so `synth --seed N` writes
    // exactly the table the experiments see for `--seed N`.
    let data = generate(&profile, args.scale, derive_seed(args.seed, "synth-data"))?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(&data, &args.out)?;
    println!("wrote {}", args.out.display());
    std::fs::write(&args.schema_out, data.schema().to_json())?;
    println!("wrote {}", args.schema_out.display());
    let counts = data.class_counts();
    println!(
        "rows: {} ({} falls, {} no-falls), variables: {}",
        data.n_rows(),
        counts.positives,
        counts.negatives,
        data.schema().variables().len()
    );
    Ok(())
}
