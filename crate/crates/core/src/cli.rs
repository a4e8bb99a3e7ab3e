//! The `dkfis` command-line front end.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 when data, config or a
//! model bundle cannot be used.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{self, SyntheticSpec, CSV_COLUMNS};
use crate::pipeline::{
    self, predict_pipeline, EvaluationReport, KnowledgeFlags, ModelBundle, PipelineConfig, PipelineError,
};
use crate::svm;

#[derive(Debug, Parser)]
#[command(name = "dkfis", version, about = "Zero / non-zero oil saturation classification and regression from well logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic well-log CSV.
    Synth(SynthArgs),
    /// Train a model bundle on the training split of a CSV.
    Train(TrainArgs),
    /// Write per-pattern predictions with the knowledge-filter audit.
    Predict(PredictArgs),
    /// Score a bundle with and without the knowledge filter.
    Evaluate(EvaluateArgs),
    /// Sweep the rbf kernel width and print g-metric means per width.
    SweepRbf(SweepArgs),
    /// Render a saved evaluation as text tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long = "n", default_value_t = 5000)]
    n_records: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = dataset::TARGET_ZERO_FRACTION)]
    zero_fraction: f64,
    /// Mean of the non-zero saturations [default: keeps the overall mean at 0.0391]
    #[arg(long)]
    nonzero_mean: Option<f64>,
    #[arg(long, default_value_t = dataset::TARGET_MAX_SATURATION)]
    max_saturation: f64,
    #[arg(long, default_value_t = 0.05)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 4)]
    wells: usize,
    /// Force a well's saturations to zero (repeatable).
    #[arg(long = "all-zero-well")]
    all_zero_wells: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// Pipeline config file, or `default`.
    #[arg(long, default_value = "default")]
    config: String,
    #[arg(long)]
    out: PathBuf,
    /// Train on every record instead of the training split.
    #[arg(long)]
    no_split: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Subset {
    All,
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Knowledge {
    /// Whatever the bundle's config enables.
    Config,
    Both,
    Class,
    Prediction,
    None,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Knowledge::Config)]
    knowledge: Knowledge,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Which records to score; `train`/`test` re-split with the bundle's split settings.
    #[arg(long, value_enum, default_value_t = Subset::All)]
    subset: Subset,
    /// Where to save the evaluation as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    widths: Vec<f64>,
    #[arg(long, default_value = "default")]
    config: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Evaluation JSON written by `evaluate --out`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    show_audit: bool,
    #[arg(long, default_value_t = 4)]
    decimals: usize,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> PipelineError {
    PipelineError::Io { path: path.display().to_string(), message: e.to_string() }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_err(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e))
        }
    }
}

fn load_config(arg: &str) -> Result<PipelineConfig, PipelineError> {
    if arg == "default" {
        Ok(PipelineConfig::default())
    } else {
        PipelineConfig::load(arg)
    }
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Synth(a) => {
            let spec = SyntheticSpec {
                n_records: a.n_records,
                zero_fraction: a.zero_fraction,
                nonzero_mean_target: a.nonzero_mean,
                max_saturation: a.max_saturation,
                noise_sigma: a.noise_sigma,
                seed: a.seed,
                n_wells: a.wells,
                all_zero_wells: a.all_zero_wells,
                ..SyntheticSpec::default()
            };
            let data = dataset::generate_synthetic(&spec)?;
            let file = std::fs::File::create(&a.out).map_err(|e| io_err(&a.out, e))?;
            dataset::write_csv(&data, std::io::BufWriter::new(file))?;
            eprintln!("wrote {} records to {}", data.len(), a.out.display());
        }
        Command::Train(a) => {
            let config = load_config(&a.config)?;
            let data = dataset::load_csv(&a.data)?;
            let train = if a.no_split { data } else { dataset::split(&data, &config.split)?.0 };
            let bundle = pipeline::train_pipeline(&train, &config)?;
            bundle.save(&a.out)?;
            let s = &bundle.summary;
            eprintln!(
                "trained on {} patterns ({} Class 1, {} passed to stage 2); svm converged: {}",
                s.n_train, s.n_class1_true, s.n_anfis_patterns, s.svm_converged
            );
        }
        Command::Predict(a) => {
            let bundle = ModelBundle::load(&a.bundle)?;
            let data = dataset::load_csv(&a.data)?;
            let cfg = &bundle.config.knowledge;
            let flags = match a.knowledge {
                Knowledge::Config => KnowledgeFlags { refine_class: cfg.refine_class, refine_prediction: cfg.refine_prediction },
                Knowledge::Both => KnowledgeFlags::ALL,
                Knowledge::Class => KnowledgeFlags { refine_class: true, refine_prediction: false },
                Knowledge::Prediction => KnowledgeFlags { refine_class: false, refine_prediction: true },
                Knowledge::None => KnowledgeFlags::NONE,
            };
            let preds = predict_pipeline(&bundle, &data.predictor_matrix(), flags)?;
            write_output(a.out.as_deref(), &prediction_csv(&data, &preds)?)?;
        }
        Command::Evaluate(a) => {
            let bundle = ModelBundle::load(&a.bundle)?;
            let data = dataset::load_csv(&a.data)?;
            let data = match a.subset {
                Subset::All => data,
                Subset::Train => dataset::split(&data, &bundle.config.split)?.0,
                Subset::Test => dataset::split(&data, &bundle.config.split)?.1,
            };
            let report = pipeline::evaluate(&bundle, &data)?;
            if let Some(out) = &a.out {
                std::fs::write(out, report.to_json()).map_err(|e| io_err(out, e))?;
            }
            let opts = &bundle.config.report;
            write_output(None, &report.render(opts.decimals, opts.show_audit))?;
        }
        Command::SweepRbf(a) => {
            let config = load_config(&a.config)?;
            let data = dataset::load_csv(&a.data)?;
            let points = pipeline::sweep_rbf_dataset(&data, &config, &a.widths)?;
            for p in &points {
                if let Some(e) = &p.error {
                    eprintln!("width {}: {e}", p.width);
                }
            }
            write_output(a.out.as_deref(), &svm::render_sweep_table(&points))?;
        }
        Command::Report(a) => {
            let text = std::fs::read_to_string(&a.input).map_err(|e| io_err(&a.input, e))?;
            let report = EvaluationReport::from_json(&text)?;
            write_output(a.out.as_deref(), &report.render(a.decimals, a.show_audit))?;
        }
    }
    Ok(())
}

/// The input columns followed by the cascade's outputs.
fn prediction_csv(data: &dataset::Dataset, preds: &[pipeline::PatternPrediction]) -> Result<String, PipelineError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| PipelineError::Io { path: "<prediction csv>".into(), message: e.to_string() };
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    header.extend(["svm_label", "refined_label", "raw_prediction", "refined_prediction", "fired_rule"]);
    w.write_record(&header).map_err(csv_err)?;
    for (r, p) in data.records().iter().zip(preds) {
        w.write_record([
            r.well_id.clone(),
            r.depth.map_or_else(String::new, |d| d.to_string()),
            r.gamma_ray.to_string(),
            r.resistivity.to_string(),
            r.density.to_string(),
            r.clay_volume.to_string(),
            r.oil_saturation.to_string(),
            p.svm_label.as_index().to_string(),
            p.refined_label.as_index().to_string(),
            p.raw_prediction.to_string(),
            p.refined_prediction.to_string(),
            p.fired_rule(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| PipelineError::Io { path: "<prediction csv>".into(), message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
