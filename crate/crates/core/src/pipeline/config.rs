use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::anfis::AnfisConfig;
use crate::dataset::{SplitSpec, DEFAULT_ZERO_THRESHOLD};
use crate::knowledge::KnowledgeSpec;
use crate::svm::{KernelSpec, SvmTrainConfig};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmSection {
    pub kernel: KernelSpec,
    pub train: SvmTrainConfig,
}

/// Where the rules come from and which knowledge stages run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnowledgeSection {
    /// Rule file; the shipped rule base when absent. Relative paths are
    /// resolved against the config file's directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rules_file: Option<PathBuf>,
    /// Overrides the rule file's `activation_threshold`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub activation_threshold: Option<f64>,
    /// Overrides the rule file's `promote_to_nonzero`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub promote_to_nonzero: Option<bool>,
    /// Apply the filter to stage-1 labels.
    pub refine_class: bool,
    /// Apply the filter to stage-2 saturations.
    pub refine_prediction: bool,
}

impl Default for KnowledgeSection {
    fn default() -> Self {
        Self {
            rules_file: None,
            activation_threshold: None,
            promote_to_nonzero: None,
            refine_class: true,
            refine_prediction: true,
        }
    }
}

impl KnowledgeSection {
    /// The rule spec with this section's overrides applied.
    pub fn resolve(&self) -> Result<KnowledgeSpec, PipelineError> {
        let mut spec = match &self.rules_file {
            Some(path) => KnowledgeSpec::load(path)?,
            None => KnowledgeSpec::default(),
        };
        if let Some(t) = self.activation_threshold {
            spec.activation_threshold = t;
        }
        if let Some(p) = self.promote_to_nonzero {
            spec.promote_to_nonzero = p;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportOptions {
    pub decimals: usize,
    /// Append the knowledge-filter audit lines to rendered reports.
    pub show_audit: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { decimals: 4, show_audit: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub zero_threshold: f64,
    pub split: SplitSpec,
    pub svm: SvmSection,
    pub anfis: AnfisConfig,
    pub knowledge: KnowledgeSection,
    pub report: ReportOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
            split: SplitSpec::default(),
            svm: SvmSection::default(),
            anfis: AnfisConfig::default(),
            knowledge: KnowledgeSection::default(),
            report: ReportOptions::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        let config: Self = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file and anchors a relative `rules_file` at it.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let mut config: Self =
            toml::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        if let Some(rules) = &config.knowledge.rules_file {
            if rules.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.knowledge.rules_file = Some(base.join(rules));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("pipeline config serializes")
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.zero_threshold >= 0.0 && self.zero_threshold < 1.0) {
            return Err(PipelineError::Config(format!("zero_threshold {} not in [0, 1)", self.zero_threshold)));
        }
        self.split.validate()?;
        self.svm.kernel.validate().map_err(PipelineError::Svm)?;
        self.svm.train.validate().map_err(PipelineError::Svm)?;
        self.anfis.validate().map_err(PipelineError::Anfis)?;
        if let Some(t) = self.knowledge.activation_threshold {
            if !(t > 0.0 && t <= 1.0) {
                return Err(PipelineError::Config(format!("knowledge.activation_threshold {t} not in (0, 1]")));
            }
        }
        if self.report.decimals > 12 {
            return Err(PipelineError::Config("report.decimals must be <= 12".into()));
        }
        Ok(())
    }
}
