//! The expert-knowledge filter.
//!
//! Expert rules such as "gamma ray high, resistivity low, density high, clay
//! volume high ⇒ oil saturation low" are evaluated as a small fuzzy
//! inference system over the raw (denormalized) logs. The filter is applied
//! twice: to the stage-1 class label and to the stage-2 saturation, where it
//! adjusts the grades of the two output categories NZS (non-zero small) and
//! NZB (non-zero big) before defuzzifying.
//!
//! A [`KnowledgeSpec`] is what an expert writes (rules, threshold, optional
//! term overrides; see `assets/expert_rules.toml`). Fitting it against a
//! training set yields a [`KnowledgeBase`] with concrete membership terms.

mod filter;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, DEFAULT_ZERO_THRESHOLD, N_PREDICTORS, PREDICTOR_NAMES};
use crate::stats;

pub use filter::{
    categorize_nzs_nzb, refine_class, refine_prediction, rule_activation, ClassRefinement,
    FilterReason, NzCategory, PredictionRefinement, RuleActivations,
};

/// The expert rule base shipped with the crate.
pub const DEFAULT_RULES_TOML: &str = include_str!("../../assets/expert_rules.toml");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KnowledgeError {
    #[error("column `{0}` is degenerate")]
    DegenerateColumn(String),
    #[error("invalid knowledge base: {0}")]
    Invalid(String),
    #[error("cannot parse knowledge file: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SaturationLevel {
    Low,
    High,
}

/// Gaussian membership `exp(-(x - center)² / (2 sigma²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianTerm {
    pub center: f64,
    pub sigma: f64,
}

impl GaussianTerm {
    pub fn new(center: f64, sigma: f64) -> Self {
        Self { center, sigma }
    }

    #[inline]
    pub fn grade(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.sigma;
        (-0.5 * z * z).exp()
    }
}

/// Low / medium / high terms of one predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorTerms {
    pub low: GaussianTerm,
    pub medium: GaussianTerm,
    pub high: GaussianTerm,
}

impl PredictorTerms {
    pub fn term(&self, level: Level) -> &GaussianTerm {
        match level {
            Level::Low => &self.low,
            Level::Medium => &self.medium,
            Level::High => &self.high,
        }
    }

    fn validate(&self, name: &str) -> Result<(), KnowledgeError> {
        let ordered = self.low.center < self.medium.center && self.medium.center < self.high.center;
        let positive = [self.low, self.medium, self.high].iter().all(|t| t.sigma > 0.0 && t.sigma.is_finite());
        if !(ordered && positive) {
            return Err(KnowledgeError::Invalid(format!(
                "`{name}` terms need low < medium < high centers and positive sigmas"
            )));
        }
        Ok(())
    }
}

/// Linguistic terms for every predictor, in raw log units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticPartition {
    pub terms: [PredictorTerms; N_PREDICTORS],
}

impl LinguisticPartition {
    /// Centers at the 10th / 50th / 90th nearest-rank percentiles of each
    /// training column; each sigma is half the distance to the nearest
    /// neighbouring center.
    pub fn fit(train: &Dataset) -> Result<Self, KnowledgeError> {
        Self::fit_rows(&train.predictor_matrix())
    }

    pub fn fit_rows(rows: &[[f64; N_PREDICTORS]]) -> Result<Self, KnowledgeError> {
        if rows.is_empty() {
            return Err(KnowledgeError::DegenerateColumn("no training rows".into()));
        }
        let mut terms = Vec::with_capacity(N_PREDICTORS);
        for (k, name) in PREDICTOR_NAMES.iter().enumerate() {
            let mut col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            col.sort_by(f64::total_cmp);
            let lo = stats::percentile_of_sorted(&col, 10.0);
            let mid = stats::percentile_of_sorted(&col, 50.0);
            let hi = stats::percentile_of_sorted(&col, 90.0);
            if !(lo < mid && mid < hi) {
                return Err(KnowledgeError::DegenerateColumn(name.to_string()));
            }
            let (gap_lo, gap_hi) = (mid - lo, hi - mid);
            terms.push(PredictorTerms {
                low: GaussianTerm::new(lo, gap_lo / 2.0),
                medium: GaussianTerm::new(mid, gap_lo.min(gap_hi) / 2.0),
                high: GaussianTerm::new(hi, gap_hi / 2.0),
            });
        }
        Ok(Self { terms: terms.try_into().expect("one entry per predictor") })
    }

    pub fn validate(&self) -> Result<(), KnowledgeError> {
        for (t, name) in self.terms.iter().zip(PREDICTOR_NAMES) {
            t.validate(name)?;
        }
        Ok(())
    }
}

/// One expert rule. The antecedent names a level for every predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertRule {
    pub name: String,
    pub gamma_ray: Level,
    pub resistivity: Level,
    pub density: Level,
    pub clay_volume: Level,
    pub saturation: SaturationLevel,
}

impl ExpertRule {
    /// Levels in predictor order.
    pub fn antecedent(&self) -> [Level; N_PREDICTORS] {
        [self.gamma_ray, self.resistivity, self.density, self.clay_volume]
    }
}

/// NZS / NZB Gaussian categories over raw saturation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputMemberships {
    pub nzs: GaussianTerm,
    pub nzb: GaussianTerm,
}

impl OutputMemberships {
    /// NZS centered on the 25th and NZB on the 75th nearest-rank percentile
    /// of the non-zero training saturations; both sigmas are half the gap.
    pub fn fit(nonzero_saturations: &[f64]) -> Result<Self, KnowledgeError> {
        let degenerate = || KnowledgeError::DegenerateColumn("non-zero oil_saturation".into());
        if nonzero_saturations.len() < 2 {
            return Err(degenerate());
        }
        let c_nzs = stats::percentile_nearest_rank(nonzero_saturations, 25.0);
        let c_nzb = stats::percentile_nearest_rank(nonzero_saturations, 75.0);
        if !(c_nzb > c_nzs) {
            return Err(degenerate());
        }
        let sigma = (c_nzb - c_nzs) / 2.0;
        let om = Self { nzs: GaussianTerm::new(c_nzs, sigma), nzb: GaussianTerm::new(c_nzb, sigma) };
        om.validate()?;
        Ok(om)
    }

    pub fn validate(&self) -> Result<(), KnowledgeError> {
        let ok = 0.0 < self.nzs.center
            && self.nzs.center < self.nzb.center
            && self.nzb.center <= 1.0
            && self.nzs.sigma > 0.0
            && self.nzb.sigma > 0.0;
        if !ok {
            return Err(KnowledgeError::Invalid(
                "output memberships need 0 < c_nzs < c_nzb <= 1 and positive sigmas".into(),
            ));
        }
        Ok(())
    }
}

/// Optional per-level overrides for one predictor.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub low: Option<GaussianTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub medium: Option<GaussianTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub high: Option<GaussianTerm>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nzs: Option<GaussianTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nzb: Option<GaussianTerm>,
}

fn default_threshold() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

/// The expert-authored part of the knowledge base, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnowledgeSpec {
    #[serde(default = "default_threshold")]
    pub activation_threshold: f64,
    #[serde(default = "default_true")]
    pub promote_to_nonzero: bool,
    pub rules: Vec<ExpertRule>,
    /// Keyed by predictor name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub partition: BTreeMap<String, TermOverrides>,
    #[serde(default)]
    pub output: OutputOverrides,
}

impl Default for KnowledgeSpec {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_RULES_TOML).expect("shipped rule file parses")
    }
}

impl KnowledgeSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, KnowledgeError> {
        let spec: Self = toml::from_str(text).map_err(|e| KnowledgeError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, KnowledgeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| KnowledgeError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("knowledge spec serializes")
    }

    pub fn validate(&self) -> Result<(), KnowledgeError> {
        if self.rules.is_empty() {
            return Err(KnowledgeError::Invalid("at least one rule is required".into()));
        }
        if !(self.activation_threshold > 0.0 && self.activation_threshold <= 1.0) {
            return Err(KnowledgeError::Invalid(format!(
                "activation_threshold {} not in (0, 1]",
                self.activation_threshold
            )));
        }
        for key in self.partition.keys() {
            if !PREDICTOR_NAMES.contains(&key.as_str()) {
                return Err(KnowledgeError::Invalid(format!("unknown predictor `{key}` in partition")));
            }
        }
        Ok(())
    }

    /// Fits percentile terms and NZS/NZB on `train`, then applies overrides.
    pub fn fit(&self, train: &Dataset, zero_threshold: f64) -> Result<(KnowledgeBase, OutputMemberships), KnowledgeError> {
        self.validate()?;
        let mut partition = LinguisticPartition::fit(train)?;
        for (k, name) in PREDICTOR_NAMES.iter().enumerate() {
            if let Some(o) = self.partition.get(*name) {
                let t = &mut partition.terms[k];
                t.low = o.low.unwrap_or(t.low);
                t.medium = o.medium.unwrap_or(t.medium);
                t.high = o.high.unwrap_or(t.high);
            }
        }
        partition.validate()?;

        let nonzero: Vec<f64> = train
            .saturations()
            .into_iter()
            .filter(|&s| s > zero_threshold)
            .collect();
        let outputs = match (self.output.nzs, self.output.nzb) {
            (Some(nzs), Some(nzb)) => OutputMemberships { nzs, nzb },
            (nzs, nzb) => {
                let fitted = OutputMemberships::fit(&nonzero)?;
                OutputMemberships { nzs: nzs.unwrap_or(fitted.nzs), nzb: nzb.unwrap_or(fitted.nzb) }
            }
        };
        outputs.validate()?;

        let kb = KnowledgeBase {
            rules: self.rules.clone(),
            partition,
            activation_threshold: self.activation_threshold,
            promote_to_nonzero: self.promote_to_nonzero,
            zero_threshold,
        };
        Ok((kb, outputs))
    }
}

/// A fitted, ready-to-apply knowledge base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub rules: Vec<ExpertRule>,
    pub partition: LinguisticPartition,
    /// τ: a rule must activate strictly above this to act.
    pub activation_threshold: f64,
    /// Whether "saturation high" rules may lift Class 0 to Class 1.
    pub promote_to_nonzero: bool,
    /// Lower clamp for refined saturations.
    pub zero_threshold: f64,
}

impl KnowledgeBase {
    pub fn new(rules: Vec<ExpertRule>, partition: LinguisticPartition, activation_threshold: f64) -> Result<Self, KnowledgeError> {
        let kb = Self {
            rules,
            partition,
            activation_threshold,
            promote_to_nonzero: true,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        };
        kb.validate()?;
        Ok(kb)
    }

    pub fn validate(&self) -> Result<(), KnowledgeError> {
        if self.rules.is_empty() {
            return Err(KnowledgeError::Invalid("at least one rule is required".into()));
        }
        if !(self.activation_threshold > 0.0 && self.activation_threshold <= 1.0) {
            return Err(KnowledgeError::Invalid("activation_threshold not in (0, 1]".into()));
        }
        self.partition.validate()
    }
}
