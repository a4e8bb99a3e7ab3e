//! Well-log patterns: the record type, CSV ingestion, per-well train/test
//! splitting and a statistics-matched synthetic generator.

mod csv_io;
mod split;
mod synthetic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use csv_io::{load_csv, read_csv, write_csv, CSV_COLUMNS};
pub use split::{split, SplitSpec};
pub use synthetic::{
    generate_synthetic, LogRange, SyntheticSpec, LOG_RANGES, TARGET_MAX_SATURATION, TARGET_OVERALL_MEAN,
    TARGET_ZERO_FRACTION,
};

/// Saturations at or below this fraction are treated as zero (Class 0).
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-6;

/// Number of predictor logs per pattern.
pub const N_PREDICTORS: usize = 4;

/// Predictor names in the fixed order used by every model in the crate.
pub const PREDICTOR_NAMES: [&str; N_PREDICTORS] =
    ["gamma_ray", "resistivity", "density", "clay_volume"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: cannot parse column `{column}`")]
    ParseError { line: usize, column: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("line {line}: {reason}")]
    InvariantViolation { line: usize, reason: String },
    #[error("well `{0}` has too few records to split")]
    TooFewRecords(String),
    #[error("invalid split spec: {0}")]
    InvalidSplit(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Stage-1 class of a pattern. Never stored; always derived from the
/// saturation and a zero threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    /// Zero or near-zero oil saturation.
    Zero,
    /// Non-zero oil saturation.
    NonZero,
}

impl ClassLabel {
    pub fn from_saturation(saturation: f64, zero_threshold: f64) -> Self {
        if saturation > zero_threshold {
            ClassLabel::NonZero
        } else {
            ClassLabel::Zero
        }
    }

    /// SVM target: Class 0 maps to -1, Class 1 to +1.
    pub fn sign(self) -> f64 {
        match self {
            ClassLabel::Zero => -1.0,
            ClassLabel::NonZero => 1.0,
        }
    }

    /// 0 or 1, as written to prediction CSVs.
    pub fn as_index(self) -> u8 {
        match self {
            ClassLabel::Zero => 0,
            ClassLabel::NonZero => 1,
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Class {}", self.as_index())
    }
}

/// One depth sample of a well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellLogRecord {
    pub well_id: String,
    /// Measured depth in meters; metadata only.
    pub depth: Option<f64>,
    /// API units.
    pub gamma_ray: f64,
    /// ohm-m.
    pub resistivity: f64,
    /// g/cc.
    pub density: f64,
    /// Fraction in `[0, 1]`.
    pub clay_volume: f64,
    /// Fraction in `[0, 1]`.
    pub oil_saturation: f64,
}

impl WellLogRecord {
    /// Predictors in [`PREDICTOR_NAMES`] order.
    pub fn predictors(&self) -> [f64; N_PREDICTORS] {
        [self.gamma_ray, self.resistivity, self.density, self.clay_volume]
    }

    pub fn class_label(&self, zero_threshold: f64) -> ClassLabel {
        ClassLabel::from_saturation(self.oil_saturation, zero_threshold)
    }

    /// Checks the record invariants, returning the first violation.
    pub fn validate(&self) -> Result<(), String> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.oil_saturation) {
            return Err(format!("oil_saturation {} outside [0, 1]", self.oil_saturation));
        }
        if !in_unit(self.clay_volume) {
            return Err(format!("clay_volume {} outside [0, 1]", self.clay_volume));
        }
        if !self.gamma_ray.is_finite() {
            return Err("gamma_ray is not finite".into());
        }
        if !(self.resistivity.is_finite() && self.resistivity > 0.0) {
            return Err(format!("resistivity {} must be finite and > 0", self.resistivity));
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(format!("density {} must be finite and > 0", self.density));
        }
        if let Some(d) = self.depth {
            if !d.is_finite() {
                return Err("depth is not finite".into());
            }
        }
        Ok(())
    }
}

/// A named, non-empty, ordered collection of validated records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    name: String,
    records: Vec<WellLogRecord>,
}

impl Dataset {
    /// Builds a dataset, validating every record. Violations report the
    /// 1-based record index as the line.
    pub fn new(name: impl Into<String>, records: Vec<WellLogRecord>) -> Result<Self, DatasetError> {
        if records.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        for (i, r) in records.iter().enumerate() {
            r.validate()
                .map_err(|reason| DatasetError::InvariantViolation { line: i + 1, reason })?;
        }
        Ok(Self { name: name.into(), records })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn records(&self) -> &[WellLogRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self, zero_threshold: f64) -> Vec<ClassLabel> {
        self.records.iter().map(|r| r.class_label(zero_threshold)).collect()
    }

    pub fn predictor_matrix(&self) -> Vec<[f64; N_PREDICTORS]> {
        self.records.iter().map(WellLogRecord::predictors).collect()
    }

    pub fn saturations(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.oil_saturation).collect()
    }

    /// Well ids in order of first appearance.
    pub fn well_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = Vec::new();
        for r in &self.records {
            if !ids.iter().any(|w| *w == r.well_id) {
                ids.push(r.well_id.clone());
            }
        }
        ids
    }

    /// Number of Class-1 records under `zero_threshold`.
    pub fn count_nonzero(&self, zero_threshold: f64) -> usize {
        self.records
            .iter()
            .filter(|r| r.class_label(zero_threshold) == ClassLabel::NonZero)
            .count()
    }
}

#[cfg(test)]
pub(crate) fn record(well: &str, preds: [f64; 4], sat: f64) -> WellLogRecord {
    WellLogRecord {
        well_id: well.into(),
        depth: None,
        gamma_ray: preds[0],
        resistivity: preds[1],
        density: preds[2],
        clay_volume: preds[3],
        oil_saturation: sat,
    }
}
