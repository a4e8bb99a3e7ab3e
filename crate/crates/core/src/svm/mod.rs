//! Stage 1: binary soft-margin SVM separating zero from non-zero oil
//! saturation, trained with Platt's Sequential Minimal Optimization.

mod kernel;
mod smo;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ClassLabel;

pub use kernel::{KernelKind, KernelSpec};
pub use smo::train_svm;
pub use sweep::{render_sweep_table, sweep_rbf_width, SweepPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training data contains a single class")]
    SingleClassInput,
    #[error("labels must be -1 or +1, found {0}")]
    InvalidLabel(f64),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("SMO stopped at the iteration limit ({0}) before meeting the KKT tolerance")]
    NonConvergence(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmTrainConfig {
    /// Box constraint.
    pub c: f64,
    pub kkt_tolerance: f64,
    /// Multipliers at or below this are dropped; also the minimum progress
    /// for an SMO step.
    pub numeric_epsilon: f64,
    /// Quiet full sweeps required before stopping.
    pub max_passes: usize,
    /// Upper bound on successful pair updates.
    pub max_iterations: usize,
    /// Per-class box constraints `c · n / (2 · n_class)`.
    pub class_weighting: bool,
    /// Seeds the start offsets of SMO's fallback scans.
    pub seed: u64,
}

impl Default for SvmTrainConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            kkt_tolerance: 1e-3,
            numeric_epsilon: 1e-12,
            max_passes: 10,
            max_iterations: 100_000,
            class_weighting: true,
            seed: 0,
        }
    }
}

impl SvmTrainConfig {
    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SvmError::InvalidConfig(format!("c {} must be > 0", self.c)));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(SvmError::InvalidConfig("kkt_tolerance must be > 0".into()));
        }
        if !(self.numeric_epsilon >= 0.0) {
            return Err(SvmError::InvalidConfig("numeric_epsilon must be >= 0".into()));
        }
        if self.max_passes == 0 || self.max_iterations == 0 {
            return Err(SvmError::InvalidConfig("max_passes and max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    /// Successful two-multiplier updates.
    pub iterations: usize,
    pub dual_objective: f64,
    pub converged: bool,
    /// Largest KKT violation over the training set with the final bias.
    pub max_kkt_violation: f64,
    /// Box constraints used for the negative and positive class.
    pub box_negative: f64,
    pub box_positive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i · y_i` per support vector.
    pub dual_coefficients: Vec<f64>,
    pub bias: f64,
    pub training_meta: TrainingMeta,
}

impl SvmModel {
    pub fn dimension(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `Σ coef_i · K(sv_i, x) + bias`.
    pub fn decision(&self, x: &[f64]) -> Result<f64, SvmError> {
        let dim = self.dimension();
        if x.len() != dim {
            return Err(SvmError::DimensionMismatch { expected: dim, found: x.len() });
        }
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_coefficients)
            .map(|(sv, coef)| coef * self.kernel.eval_unchecked(sv, x))
            .sum();
        Ok(sum + self.bias)
    }

    /// Class 1 iff the decision value is strictly positive; an exact tie
    /// stays in Class 0 so it is never passed on to regression.
    pub fn classify(&self, x: &[f64]) -> Result<(ClassLabel, f64), SvmError> {
        let d = self.decision(x)?;
        let label = if d > 0.0 { ClassLabel::NonZero } else { ClassLabel::Zero };
        Ok((label, d))
    }

    /// Turns an iteration-limit stop into an error.
    pub fn ensure_converged(&self) -> Result<(), SvmError> {
        if self.training_meta.converged {
            Ok(())
        } else {
            Err(SvmError::NonConvergence(self.training_meta.iterations))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model(bias: f64) -> SvmModel {
        SvmModel {
            kernel: KernelSpec::linear(),
            support_vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            dual_coefficients: vec![1.0, -1.0],
            bias,
            training_meta: TrainingMeta {
                iterations: 0,
                dual_objective: 0.0,
                converged: true,
                max_kkt_violation: 0.0,
                box_negative: 1.0,
                box_positive: 1.0,
            },
        }
    }

    #[test]
    fn zero_decision_is_class_zero() {
        let m = toy_model(0.0);
        assert_eq!(m.classify(&[2.0, 2.0]).unwrap(), (ClassLabel::Zero, 0.0));
        assert_eq!(m.classify(&[2.0, 1.0]).unwrap().0, ClassLabel::NonZero);
        assert!(matches!(m.classify(&[1.0]), Err(SvmError::DimensionMismatch { .. })));
    }

    #[test]
    fn non_convergence_is_reported() {
        let mut m = toy_model(0.0);
        m.training_meta.converged = false;
        m.training_meta.iterations = 7;
        assert_eq!(m.ensure_converged().unwrap_err(), SvmError::NonConvergence(7));
    }
}
