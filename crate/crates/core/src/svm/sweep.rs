use std::fmt::Write;

use super::{train_svm, KernelSpec, SvmTrainConfig};
use crate::dataset::ClassLabel;
use crate::metrics::{g_metric_means, ConfusionCounts};

/// One row of an rbf width sweep. `g_metric_means` is `None` when training
/// or scoring failed for that width; `error` then says why.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub width: f64,
    pub g_metric_means: Option<f64>,
    pub error: Option<String>,
}

/// Trains one rbf SVM per width and scores it on the test patterns.
/// Rows come back in the order of `widths`.
pub fn sweep_rbf_width(
    train_x: &[Vec<f64>],
    train_y: &[f64],
    test_x: &[Vec<f64>],
    test_y: &[f64],
    widths: &[f64],
    config: &SvmTrainConfig,
) -> Vec<SweepPoint> {
    let truth: Vec<ClassLabel> = test_y
        .iter()
        .map(|&y| if y > 0.0 { ClassLabel::NonZero } else { ClassLabel::Zero })
        .collect();
    widths
        .iter()
        .map(|&width| {
            let scored = train_svm(train_x, train_y, KernelSpec::rbf(width), config)
                .map_err(|e| e.to_string())
                .and_then(|model| {
                    let predicted = test_x
                        .iter()
                        .map(|x| model.classify(x).map(|(l, _)| l))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    g_metric_means(&ConfusionCounts::from_labels(&truth, &predicted))
                        .map_err(|e| e.to_string())
                });
            match scored {
                Ok(g) => SweepPoint { width, g_metric_means: Some(g), error: None },
                Err(e) => SweepPoint { width, g_metric_means: None, error: Some(e) },
            }
        })
        .collect()
}

/// Two-column, tab-separated table; failed widths print `NA`.
pub fn render_sweep_table(points: &[SweepPoint]) -> String {
    let mut out = String::from("width\tg_metric_means\n");
    for p in points {
        match p.g_metric_means {
            Some(g) => writeln!(out, "{}\t{:.4}", p.width, g),
            None => writeln!(out, "{}\tNA", p.width),
        }
        .expect("writing to a String");
    }
    out
}
