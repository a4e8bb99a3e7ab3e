//! The full cascade: training, prediction, evaluation and model bundles.
//!
//! Training fits the scalers on the training split, trains the SVM on every
//! pattern, filters the SVM's training labels through the knowledge base,
//! and trains the ANFIS only on the patterns that remain Class 1. Prediction
//! runs the same chain on new patterns with each knowledge stage
//! individually switchable, which yields the "with" and "without" arms of an
//! evaluation from a single bundle.

mod bundle;
mod config;
mod report;

use thiserror::Error;

use crate::anfis::{self, AnfisError};
use crate::dataset::{self, ClassLabel, Dataset, DatasetError, N_PREDICTORS};
use crate::knowledge::{self, FilterReason, KnowledgeError};
use crate::metrics::MetricsError;
use crate::preprocess::{MinMaxScaler, PreprocessError, ZScoreScaler};
use crate::svm::{self, SvmError, SweepPoint};

pub use bundle::{ModelBundle, TrainingSummary, BUNDLE_FORMAT, BUNDLE_VERSION};
pub use config::{KnowledgeSection, PipelineConfig, ReportOptions, SvmSection};
pub use report::{evaluate, AuditEntry, ClassificationArm, EvaluationReport, PredictionArm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("data: {0}")]
    Data(#[from] DatasetError),
    #[error("preprocessing: {0}")]
    Preprocess(#[from] PreprocessError),
    #[error("stage 1 (svm): {0}")]
    Svm(SvmError),
    #[error("knowledge filter: {0}")]
    Knowledge(#[from] KnowledgeError),
    #[error("stage 2 (anfis): {0}")]
    Anfis(AnfisError),
    #[error("evaluation ({arm}): {source}")]
    Metric { arm: &'static str, source: MetricsError },
    #[error("config: {0}")]
    Config(String),
    #[error("model bundle format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },
    #[error("model bundle: {0}")]
    Bundle(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Which knowledge stages to run at prediction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnowledgeFlags {
    pub refine_class: bool,
    pub refine_prediction: bool,
}

impl KnowledgeFlags {
    pub const ALL: Self = Self { refine_class: true, refine_prediction: true };
    pub const NONE: Self = Self { refine_class: false, refine_prediction: false };
}

/// Everything the cascade decided for one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternPrediction {
    pub svm_label: ClassLabel,
    pub svm_decision: f64,
    pub refined_label: ClassLabel,
    pub class_reason: FilterReason,
    /// De-normalized ANFIS output, or exactly 0 for Class 0 patterns.
    pub raw_prediction: f64,
    pub refined_prediction: f64,
    pub prediction_reason: FilterReason,
}

impl PatternPrediction {
    /// Rule names behind any change, or `pass-through`.
    pub fn fired_rule(&self) -> String {
        match (&self.class_reason, &self.prediction_reason) {
            (FilterReason::PassThrough, p) => p.to_string(),
            (c, FilterReason::PassThrough) => c.to_string(),
            (c, p) => format!("{c};{p}"),
        }
    }
}

fn normalized_rows(scaler: &ZScoreScaler, rows: &[[f64; N_PREDICTORS]]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| scaler.apply(r).to_vec()).collect()
}

/// Trains every component of the cascade on `train`.
pub fn train_pipeline(train: &Dataset, config: &PipelineConfig) -> Result<ModelBundle, PipelineError> {
    config.validate()?;
    let zt = config.zero_threshold;
    let raw = train.predictor_matrix();
    let truth = train.labels(zt);
    if truth.iter().all(|&l| l == truth[0]) {
        return Err(PipelineError::Svm(SvmError::SingleClassInput));
    }

    let zscore = ZScoreScaler::fit(train)?;
    let x = normalized_rows(&zscore, &raw);
    let y: Vec<f64> = truth.iter().map(|l| l.sign()).collect();
    let svm_model = svm::train_svm(&x, &y, config.svm.kernel, &config.svm.train).map_err(PipelineError::Svm)?;

    let spec = config.knowledge.resolve()?;
    let (kb, outputs) = spec.fit(train, zt)?;

    // Stage-1 outputs on the training patterns, refined like test outputs.
    let mut class1 = Vec::new();
    for (i, xi) in x.iter().enumerate() {
        let (label, _) = svm_model.classify(xi).map_err(PipelineError::Svm)?;
        let label = if config.knowledge.refine_class {
            knowledge::refine_class(&kb, &raw[i], label).label
        } else {
            label
        };
        if label == ClassLabel::NonZero {
            class1.push(i);
        }
    }
    if class1.len() < 2 {
        return Err(PipelineError::Anfis(AnfisError::TooFewPatterns { needed: 2, got: class1.len() }));
    }

    let saturations = train.saturations();
    let minmax = MinMaxScaler::fit(&saturations, 0.0, 1.0)?;
    let anfis_x: Vec<Vec<f64>> = class1.iter().map(|&i| x[i].clone()).collect();
    let anfis_y: Vec<f64> = class1.iter().map(|&i| minmax.apply(saturations[i])).collect();
    let anfis_model = anfis::train_anfis(&anfis_x, &anfis_y, &config.anfis).map_err(PipelineError::Anfis)?;

    let summary = TrainingSummary {
        dataset: train.name().to_string(),
        n_train: train.len(),
        n_class1_true: truth.iter().filter(|&&l| l == ClassLabel::NonZero).count(),
        n_anfis_patterns: class1.len(),
        svm_converged: svm_model.training_meta.converged,
    };
    Ok(ModelBundle::new(config.clone(), zscore, minmax, svm_model, anfis_model, kb, outputs, summary))
}

/// Runs the cascade on raw predictor rows.
pub fn predict_pipeline(
    bundle: &ModelBundle,
    patterns: &[[f64; N_PREDICTORS]],
    flags: KnowledgeFlags,
) -> Result<Vec<PatternPrediction>, PipelineError> {
    patterns.iter().map(|raw| predict_one(bundle, raw, flags)).collect()
}

fn predict_one(bundle: &ModelBundle, raw: &[f64; N_PREDICTORS], flags: KnowledgeFlags) -> Result<PatternPrediction, PipelineError> {
    let z = bundle.zscore.apply(raw);
    let (svm_label, svm_decision) = bundle.svm.classify(&z).map_err(PipelineError::Svm)?;
    let (refined_label, class_reason) = if flags.refine_class {
        let r = knowledge::refine_class(&bundle.knowledge, raw, svm_label);
        (r.label, r.reason)
    } else {
        (svm_label, FilterReason::PassThrough)
    };

    if refined_label == ClassLabel::Zero {
        return Ok(PatternPrediction {
            svm_label,
            svm_decision,
            refined_label,
            class_reason,
            raw_prediction: 0.0,
            refined_prediction: 0.0,
            prediction_reason: FilterReason::PassThrough,
        });
    }

    let normalized = bundle.anfis.predict(&z).map_err(PipelineError::Anfis)?;
    let raw_prediction = bundle.minmax.invert(normalized);
    let (refined_prediction, prediction_reason) = if flags.refine_prediction {
        let r = knowledge::refine_prediction(&bundle.knowledge, &bundle.outputs, raw, raw_prediction);
        // Rules that did not fire still leave an infeasible value behind;
        // the knowledge stage never emits one.
        if r.reason == FilterReason::PassThrough && !(0.0..=1.0).contains(&r.saturation) {
            (r.saturation.clamp(0.0, 1.0), FilterReason::RangeClamp)
        } else {
            (r.saturation, r.reason)
        }
    } else {
        (raw_prediction, FilterReason::PassThrough)
    };
    Ok(PatternPrediction {
        svm_label,
        svm_decision,
        refined_label,
        class_reason,
        raw_prediction,
        refined_prediction,
        prediction_reason,
    })
}

/// Splits `data` per the config, then sweeps the rbf width on the split.
pub fn sweep_rbf_dataset(data: &Dataset, config: &PipelineConfig, widths: &[f64]) -> Result<Vec<SweepPoint>, PipelineError> {
    config.validate()?;
    if widths.is_empty() || widths.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(PipelineError::Config("widths must be a non-empty list of positive numbers".into()));
    }
    let (train, test) = dataset::split(data, &config.split)?;
    let zscore = ZScoreScaler::fit(&train)?;
    let zt = config.zero_threshold;
    let signs = |d: &Dataset| d.labels(zt).iter().map(|l| l.sign()).collect::<Vec<_>>();
    Ok(svm::sweep_rbf_width(
        &normalized_rows(&zscore, &train.predictor_matrix()),
        &signs(&train),
        &normalized_rows(&zscore, &test.predictor_matrix()),
        &signs(&test),
        widths,
        &config.svm.train,
    ))
}
