//! Two-stage oil-saturation prediction from well logs.
//!
//! Stage 1 separates zero from non-zero oil-saturation patterns with an
//! SMO-trained support vector machine. Stage 2 regresses the non-zero
//! saturations with a first-order Takagi–Sugeno ANFIS. After each stage a
//! fuzzy knowledge filter built from expert rules validates or corrects the
//! data-driven output.
//!
//! ```text
//!  logs ──▶ z-score ──▶ SVM ──▶ knowledge(class) ──┬─ Class 0 ──▶ 0
//!                                                   └─ Class 1 ──▶ ANFIS ──▶ de-normalize ──▶ knowledge(value)
//! ```
//!
//! The crate is organised by pipeline stage:
//!
//! - [`dataset`]: well-log records, CSV ingestion, per-well splits, synthetic data
//! - [`preprocess`]: z-score and min-max scalers
//! - [`svm`]: kernels, SMO training, classification, rbf width sweep
//! - [`anfis`]: gbell premises, hybrid LSE + back-propagation training
//! - [`knowledge`]: expert rule base and the class/value refinement filter
//! - [`metrics`]: g-metric means, CC, RMSE, AEM, SI
//! - [`pipeline`]: end-to-end training, prediction, evaluation, model bundles
//! - [`cli`]: the `dkfis` command-line front end

pub mod anfis;
pub mod cli;
pub mod dataset;
pub mod knowledge;
pub mod metrics;
pub mod pipeline;
pub mod preprocess;
pub mod stats;
pub mod svm;

pub use dataset::{ClassLabel, Dataset, WellLogRecord, DEFAULT_ZERO_THRESHOLD};
