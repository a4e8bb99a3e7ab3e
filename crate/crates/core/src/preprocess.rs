//! Z-score scaling of the predictor logs and min-max scaling of the target.
//!
//! Both scalers are fitted on training data only and are plain affine maps
//! afterwards: nothing is clamped, so test values outside the training range
//! stay visibly out of range.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, N_PREDICTORS, PREDICTOR_NAMES};
use crate::stats;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PreprocessError {
    #[error("column `{0}` has zero spread")]
    DegenerateColumn(String),
    #[error("invalid output interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
}

/// Per-predictor `(p - mean) / sd` with the sample (n - 1) standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreScaler {
    pub mean: [f64; N_PREDICTORS],
    pub standard_deviation: [f64; N_PREDICTORS],
}

impl ZScoreScaler {
    pub fn fit(train: &Dataset) -> Result<Self, PreprocessError> {
        let rows = train.predictor_matrix();
        Self::fit_rows(&rows)
    }

    pub fn fit_rows(rows: &[[f64; N_PREDICTORS]]) -> Result<Self, PreprocessError> {
        let mut mean = [0.0; N_PREDICTORS];
        let mut sd = [0.0; N_PREDICTORS];
        for k in 0..N_PREDICTORS {
            let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            let s = stats::sample_variance(&col).sqrt();
            if !(s > 0.0 && s.is_finite()) {
                return Err(PreprocessError::DegenerateColumn(PREDICTOR_NAMES[k].to_string()));
            }
            mean[k] = stats::mean(&col);
            sd[k] = s;
        }
        Ok(Self { mean, standard_deviation: sd })
    }

    pub fn apply(&self, predictors: &[f64; N_PREDICTORS]) -> [f64; N_PREDICTORS] {
        std::array::from_fn(|k| (predictors[k] - self.mean[k]) / self.standard_deviation[k])
    }
}

/// Affine map of `[min_x, max_x]` onto `[new_min_x, new_max_x]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min_x: f64,
    pub max_x: f64,
    pub new_min_x: f64,
    pub new_max_x: f64,
}

impl MinMaxScaler {
    pub fn fit(targets: &[f64], new_min_x: f64, new_max_x: f64) -> Result<Self, PreprocessError> {
        if !(new_max_x > new_min_x) {
            return Err(PreprocessError::InvalidInterval(new_min_x, new_max_x));
        }
        let min_x = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let max_x = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max_x > min_x) {
            return Err(PreprocessError::DegenerateColumn("target".into()));
        }
        Ok(Self { min_x, max_x, new_min_x, new_max_x })
    }

    pub fn apply(&self, val: f64) -> f64 {
        (val - self.min_x) / (self.max_x - self.min_x) * (self.new_max_x - self.new_min_x)
            + self.new_min_x
    }

    pub fn invert(&self, normalized_val: f64) -> f64 {
        (normalized_val - self.new_min_x) / (self.new_max_x - self.new_min_x)
            * (self.max_x - self.min_x)
            + self.min_x
    }
}
