use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{predict_pipeline, KnowledgeFlags, ModelBundle, PipelineError};
use crate::dataset::{ClassLabel, Dataset};
use crate::knowledge::FilterReason;
use crate::metrics::{self, ConfusionCounts, RegressionMetrics};

/// Stage-1 scores for one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationArm {
    pub counts: ConfusionCounts,
    pub g_metric_means: f64,
}

/// Stage-2 scores for one arm over the true Class 1 patterns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionArm {
    pub metrics: RegressionMetrics,
}

/// A pattern the knowledge filter acted on in the "included" arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    /// Zero-based position in the evaluated dataset.
    pub index: usize,
    pub well_id: String,
    pub depth: Option<f64>,
    pub svm_label: ClassLabel,
    pub refined_label: ClassLabel,
    pub class_reason: FilterReason,
    pub raw_prediction: f64,
    pub refined_prediction: f64,
    pub prediction_reason: FilterReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub dataset: String,
    pub n_patterns: usize,
    pub kernel: String,
    /// Always "raw oil saturation": regression metrics are computed after
    /// de-normalization.
    pub metric_scale: String,
    pub n_prediction_patterns: usize,
    pub classification_without: ClassificationArm,
    pub classification_with: ClassificationArm,
    pub prediction_without: PredictionArm,
    pub prediction_with: PredictionArm,
    pub audit: Vec<AuditEntry>,
}

fn classification_arm(truth: &[ClassLabel], predicted: &[ClassLabel], arm: &'static str) -> Result<ClassificationArm, PipelineError> {
    let counts = ConfusionCounts::from_labels(truth, predicted);
    let g = metrics::g_metric_means(&counts).map_err(|source| PipelineError::Metric { arm, source })?;
    Ok(ClassificationArm { counts, g_metric_means: g })
}

/// Four-way evaluation (classification and prediction, each with and
/// without the knowledge filter) on `test`.
///
/// Both arms come from the same bundle; only the knowledge stages differ.
/// Prediction metrics use the patterns whose true label is Class 1, so
/// the two arms are scored on identical sets.
pub fn evaluate(bundle: &ModelBundle, test: &Dataset) -> Result<EvaluationReport, PipelineError> {
    let zt = bundle.config.zero_threshold;
    let raw = test.predictor_matrix();
    let truth = test.labels(zt);
    let without = predict_pipeline(bundle, &raw, KnowledgeFlags::NONE)?;
    let with = predict_pipeline(bundle, &raw, KnowledgeFlags::ALL)?;

    let labels = |p: &[super::PatternPrediction]| p.iter().map(|q| q.refined_label).collect::<Vec<_>>();
    let classification_without = classification_arm(&truth, &labels(&without), "classification without knowledge")?;
    let classification_with = classification_arm(&truth, &labels(&with), "classification with knowledge")?;

    let class1: Vec<usize> = (0..test.len()).filter(|&i| truth[i] == ClassLabel::NonZero).collect();
    let observed: Vec<f64> = class1.iter().map(|&i| test.records()[i].oil_saturation).collect();
    let arm = |preds: &[super::PatternPrediction], name: &'static str| -> Result<PredictionArm, PipelineError> {
        let predicted: Vec<f64> = class1.iter().map(|&i| preds[i].refined_prediction).collect();
        let m = metrics::regression_metrics(&predicted, &observed)
            .map_err(|source| PipelineError::Metric { arm: name, source })?;
        Ok(PredictionArm { metrics: m })
    };
    let prediction_without = arm(&without, "prediction without knowledge")?;
    let prediction_with = arm(&with, "prediction with knowledge")?;

    let audit = with
        .iter()
        .enumerate()
        .filter(|(_, p)| p.class_reason != FilterReason::PassThrough || p.prediction_reason != FilterReason::PassThrough)
        .map(|(i, p)| {
            let r = &test.records()[i];
            AuditEntry {
                index: i,
                well_id: r.well_id.clone(),
                depth: r.depth,
                svm_label: p.svm_label,
                refined_label: p.refined_label,
                class_reason: p.class_reason.clone(),
                raw_prediction: p.raw_prediction,
                refined_prediction: p.refined_prediction,
                prediction_reason: p.prediction_reason.clone(),
            }
        })
        .collect();

    Ok(EvaluationReport {
        dataset: test.name().to_string(),
        n_patterns: test.len(),
        kernel: bundle.svm.kernel.kind.name().to_string(),
        metric_scale: "raw oil saturation".to_string(),
        n_prediction_patterns: class1.len(),
        classification_without,
        classification_with,
        prediction_without,
        prediction_with,
        audit,
    })
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Bundle(format!("evaluation report: {e}")))
    }

    /// Text tables: classification by knowledge arm and kernel, then the
    /// four regression indicators side by side.
    pub fn render(&self, decimals: usize, show_audit: bool) -> String {
        let mut out = String::new();
        let d = decimals;
        let w = |out: &mut String, line: String| writeln!(out, "{line}").expect("writing to a String");

        w(&mut out, format!("Classification of testing patterns ({}, n = {})", self.dataset, self.n_patterns));
        w(&mut out, format!("{:<20}{:<18}{}", "Expert Knowledge", "Kernel Function", "G-metric means"));
        for (name, arm) in [("Not Included", &self.classification_without), ("Included", &self.classification_with)] {
            w(&mut out, format!("{:<20}{:<18}{:.d$}", name, self.kernel, arm.g_metric_means));
        }
        for (name, arm) in [("Not Included", &self.classification_without), ("Included", &self.classification_with)] {
            let c = arm.counts;
            w(&mut out, format!("  {name}: tp={} fp={} tn={} fn={}", c.tp, c.fp, c.tn, c.fn_));
        }
        w(&mut out, String::new());
        w(
            &mut out,
            format!(
                "Prediction of Class 1 testing patterns (n = {}; metrics on {})",
                self.n_prediction_patterns, self.metric_scale
            ),
        );
        w(&mut out, format!("{:<24}{:<30}{}", "Performance Indicator", "Excluding Expert Knowledge", "Including Expert Knowledge"));
        let (a, b) = (self.prediction_without.metrics, self.prediction_with.metrics);
        for (name, x, y) in [("CC", a.cc, b.cc), ("RMSE", a.rmse, b.rmse), ("AEM", a.aem, b.aem), ("SI", a.si, b.si)] {
            w(&mut out, format!("{:<24}{:<30.d$}{:.d$}", name, x, y));
        }
        w(&mut out, String::new());
        w(&mut out, format!("Knowledge filter acted on {} of {} patterns", self.audit.len(), self.n_patterns));
        if show_audit {
            for e in &self.audit {
                w(
                    &mut out,
                    format!(
                        "  #{} well {}: {} -> {} [{}], {:.d$} -> {:.d$} [{}]",
                        e.index,
                        e.well_id,
                        e.svm_label,
                        e.refined_label,
                        e.class_reason,
                        e.raw_prediction,
                        e.refined_prediction,
                        e.prediction_reason
                    ),
                );
            }
        }
        out
    }
}
