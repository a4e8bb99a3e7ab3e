use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PipelineConfig, PipelineError};
use crate::anfis::AnfisModel;
use crate::dataset::N_PREDICTORS;
use crate::knowledge::{KnowledgeBase, OutputMemberships};
use crate::preprocess::{MinMaxScaler, ZScoreScaler};
use crate::svm::SvmModel;

pub const BUNDLE_FORMAT: &str = "dkfis-model-bundle";
pub const BUNDLE_VERSION: u32 = 1;

/// Counts recorded while training, for reports and sanity checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub dataset: String,
    pub n_train: usize,
    pub n_class1_true: usize,
    /// Patterns that were Class 1 after stage-1 refinement.
    pub n_anfis_patterns: usize,
    pub svm_converged: bool,
}

/// A trained cascade, saved as a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format: String,
    pub version: u32,
    pub config: PipelineConfig,
    pub zscore: ZScoreScaler,
    pub minmax: MinMaxScaler,
    pub svm: SvmModel,
    pub anfis: AnfisModel,
    pub knowledge: KnowledgeBase,
    pub outputs: OutputMemberships,
    pub summary: TrainingSummary,
}

impl ModelBundle {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        config: PipelineConfig,
        zscore: ZScoreScaler,
        minmax: MinMaxScaler,
        svm: SvmModel,
        anfis: AnfisModel,
        knowledge: KnowledgeBase,
        outputs: OutputMemberships,
        summary: TrainingSummary,
    ) -> Self {
        Self {
            format: BUNDLE_FORMAT.to_string(),
            version: BUNDLE_VERSION,
            config,
            zscore,
            minmax,
            svm,
            anfis,
            knowledge,
            outputs,
            summary,
        }
    }

    /// Checks that the parts agree on the predictor schema.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Bundle(m));
        if self.format != BUNDLE_FORMAT {
            return bad(format!("unexpected format tag `{}`", self.format));
        }
        if self.svm.dimension() != N_PREDICTORS {
            return bad(format!("svm expects {} inputs, not {N_PREDICTORS}", self.svm.dimension()));
        }
        if self.anfis.n_inputs != N_PREDICTORS {
            return bad(format!("anfis expects {} inputs, not {N_PREDICTORS}", self.anfis.n_inputs));
        }
        if self.svm.support_vectors.len() != self.svm.dual_coefficients.len() {
            return bad("svm support vectors and coefficients differ in length".into());
        }
        let n_params = self.anfis.n_inputs + 1;
        if self.anfis.consequents.len() != self.anfis.mfs_per_input.pow(self.anfis.n_inputs as u32)
            || self.anfis.consequents.iter().any(|c| c.len() != n_params)
        {
            return bad("anfis consequents do not match the rule grid".into());
        }
        self.knowledge.validate()?;
        self.outputs.validate()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    /// Parses a bundle, checking the version before the body so an old or
    /// future file reports a version problem rather than a field error.
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| PipelineError::Bundle(e.to_string()))?;
        match value.get("version") {
            Some(v) if v.as_u64() == Some(u64::from(BUNDLE_VERSION)) => {}
            other => {
                let found = other.map_or_else(|| "missing".to_string(), |v| v.to_string());
                return Err(PipelineError::VersionMismatch { found, expected: BUNDLE_VERSION });
            }
        }
        let bundle: Self = serde_json::from_value(value).map_err(|e| PipelineError::Bundle(e.to_string()))?;
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PipelineError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| PipelineError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }
}
