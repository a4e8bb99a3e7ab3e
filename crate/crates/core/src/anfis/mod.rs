//! Stage 2: first-order Takagi–Sugeno ANFIS regressing normalized oil
//! saturation on Class-1 patterns.
//!
//! Premises are grid-partitioned: every input carries `mfs_per_input` gbell
//! membership functions and there is one rule per combination, so a model
//! with `d` inputs has `mfs_per_input^d` rules. Each rule's consequent is a
//! linear form `p · x + q`. Training is hybrid: consequents by (ridge)
//! least squares, premises by gradient descent on the back-propagated
//! squared error.

mod gradient;
mod lse;
mod membership;
mod train;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gradient::{premise_gradient, PremiseGradient};
pub use lse::{lse_consequents, regressor_row, ridge_objective_gradient};
pub use membership::{gbell, GBellParams, GBellPartials};
pub use train::{initial_model, train_anfis};

/// Total firing below this is treated as "no rule active".
pub const MIN_TOTAL_FIRING: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnfisError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("least-squares solve failed: {0}")]
    NumericalFailure(String),
    #[error("need at least {needed} training patterns, got {got}")]
    TooFewPatterns { needed: usize, got: usize },
    #[error("{0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnfisConfig {
    pub mfs_per_input: usize,
    pub epochs: usize,
    /// Length of the first premise step in parameter space.
    pub initial_step: f64,
    pub step_increase: f64,
    pub step_decrease: f64,
    pub ridge_lambda: f64,
}

impl Default for AnfisConfig {
    fn default() -> Self {
        Self {
            mfs_per_input: 2,
            epochs: 100,
            initial_step: 0.01,
            step_increase: 1.1,
            step_decrease: 0.9,
            ridge_lambda: 1e-8,
        }
    }
}

impl AnfisConfig {
    pub fn validate(&self) -> Result<(), AnfisError> {
        let bad = |m: &str| Err(AnfisError::InvalidConfig(m.to_string()));
        if self.mfs_per_input < 2 {
            return bad("mfs_per_input must be >= 2");
        }
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if !(self.initial_step > 0.0) {
            return bad("initial_step must be > 0");
        }
        if !(0.0 < self.step_decrease && self.step_decrease < 1.0 && 1.0 < self.step_increase) {
            return bad("need 0 < step_decrease < 1 < step_increase");
        }
        if !(self.ridge_lambda >= 0.0) {
            return bad("ridge_lambda must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnfisModel {
    pub n_inputs: usize,
    pub mfs_per_input: usize,
    /// `premises[input][mf]`.
    pub premises: Vec<Vec<GBellParams>>,
    /// `consequents[rule]` = `[p_1, ..., p_d, q]`.
    pub consequents: Vec<Vec<f64>>,
    /// Training RMSE after each epoch's least-squares step.
    pub training_history: Vec<f64>,
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    pub output: f64,
    /// Raw firing strength per rule.
    pub firing: Vec<f64>,
    /// `firing / Σ firing`; uniform when the total underflows.
    pub normalized: Vec<f64>,
    /// The consequent linear form of every rule evaluated at `x`.
    pub rule_outputs: Vec<f64>,
    /// `Σ firing < MIN_TOTAL_FIRING`.
    pub degenerate: bool,
}

impl AnfisModel {
    /// A model with the given premises and all-zero consequents.
    pub fn with_premises(premises: Vec<Vec<GBellParams>>) -> Self {
        let n_inputs = premises.len();
        let mfs_per_input = premises.first().map_or(0, Vec::len);
        assert!(premises.iter().all(|p| p.len() == mfs_per_input), "ragged premise grid");
        let n_rules = mfs_per_input.pow(n_inputs as u32);
        Self {
            n_inputs,
            mfs_per_input,
            premises,
            consequents: vec![vec![0.0; n_inputs + 1]; n_rules],
            training_history: Vec::new(),
        }
    }

    pub fn n_rules(&self) -> usize {
        self.consequents.len()
    }

    /// Number of consequent parameters, `rules · (inputs + 1)`.
    pub fn n_consequent_params(&self) -> usize {
        self.n_rules() * (self.n_inputs + 1)
    }

    /// Membership-function index used by `rule` for `input`. Input 0 is the
    /// most significant digit of the rule index.
    #[inline]
    pub fn rule_mf(&self, rule: usize, input: usize) -> usize {
        let shift = (self.n_inputs - 1 - input) as u32;
        (rule / self.mfs_per_input.pow(shift)) % self.mfs_per_input
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), AnfisError> {
        if x.len() != self.n_inputs {
            return Err(AnfisError::DimensionMismatch { expected: self.n_inputs, found: x.len() });
        }
        Ok(())
    }

    /// `grades[input][mf]` at `x`.
    pub(crate) fn grades(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.premises
            .iter()
            .zip(x)
            .map(|(mfs, &xi)| mfs.iter().map(|p| p.grade(xi)).collect())
            .collect()
    }

    pub(crate) fn forward_unchecked(&self, x: &[f64]) -> ForwardPass {
        let grades = self.grades(x);
        let n_rules = self.n_rules();
        let firing: Vec<f64> = (0..n_rules)
            .map(|r| (0..self.n_inputs).map(|i| grades[i][self.rule_mf(r, i)]).product())
            .collect();
        let total: f64 = firing.iter().sum();
        let rule_outputs: Vec<f64> = self
            .consequents
            .iter()
            .map(|coef| {
                coef[..self.n_inputs].iter().zip(x).map(|(p, xi)| p * xi).sum::<f64>()
                    + coef[self.n_inputs]
            })
            .collect();
        if !(total >= MIN_TOTAL_FIRING) {
            let constant_mean =
                self.consequents.iter().map(|c| c[self.n_inputs]).sum::<f64>() / n_rules as f64;
            return ForwardPass {
                output: constant_mean,
                firing,
                normalized: vec![1.0 / n_rules as f64; n_rules],
                rule_outputs,
                degenerate: true,
            };
        }
        let normalized: Vec<f64> = firing.iter().map(|w| w / total).collect();
        let output = normalized.iter().zip(&rule_outputs).map(|(w, f)| w * f).sum();
        ForwardPass { output, firing, normalized, rule_outputs, degenerate: false }
    }

    /// Full forward pass with every layer's values.
    pub fn forward(&self, x: &[f64]) -> Result<ForwardPass, AnfisError> {
        self.check_dim(x)?;
        Ok(self.forward_unchecked(x))
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, AnfisError> {
        self.forward(x).map(|f| f.output)
    }

    pub fn rmse(&self, inputs: &[Vec<f64>], targets: &[f64]) -> f64 {
        let se: f64 = inputs
            .iter()
            .zip(targets)
            .map(|(x, t)| {
                let e = self.forward_unchecked(x).output - t;
                e * e
            })
            .sum();
        (se / targets.len() as f64).sqrt()
    }

    pub(crate) fn premises_valid(&self) -> bool {
        self.premises.iter().flatten().all(GBellParams::is_valid)
    }
}
