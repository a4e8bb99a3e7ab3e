//! Evaluation metrics for both stages.
//!
//! Classification uses the g-metric means (geometric mean of sensitivity and
//! specificity) because plain accuracy rewards predicting "zero" everywhere
//! on a dataset that is mostly zero.
//!
//! Regression metrics are
//!
//! | metric | definition |
//! |--------|------------|
//! | CC     | Pearson correlation of predicted and observed |
//! | RMSE   | `sqrt(mean((p - o)²))` |
//! | AEM    | absolute error mean, `mean(|p - o|)` |
//! | SI     | scatter index, `RMSE / mean(o)` |

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ClassLabel;
use crate::stats;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{which} is undefined: {reason}")]
    UndefinedMetric { which: &'static str, reason: String },
}

fn undefined(which: &'static str, reason: impl Into<String>) -> MetricsError {
    MetricsError::UndefinedMetric { which, reason: reason.into() }
}

/// Binary confusion counts with Class 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn from_labels(truth: &[ClassLabel], predicted: &[ClassLabel]) -> Self {
        let mut c = Self::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (t, p) {
                (ClassLabel::NonZero, ClassLabel::NonZero) => c.tp += 1,
                (ClassLabel::Zero, ClassLabel::NonZero) => c.fp += 1,
                (ClassLabel::Zero, ClassLabel::Zero) => c.tn += 1,
                (ClassLabel::NonZero, ClassLabel::Zero) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn sensitivity(&self) -> Option<f64> {
        let p = self.tp + self.fn_;
        (p > 0).then(|| self.tp as f64 / p as f64)
    }

    pub fn specificity(&self) -> Option<f64> {
        let n = self.tn + self.fp;
        (n > 0).then(|| self.tn as f64 / n as f64)
    }
}

/// `sqrt(sensitivity · specificity)`.
pub fn g_metric_means(c: &ConfusionCounts) -> Result<f64, MetricsError> {
    let sens = c.sensitivity().ok_or_else(|| undefined("g_metric_means", "no Class 1 patterns"))?;
    let spec = c.specificity().ok_or_else(|| undefined("g_metric_means", "no Class 0 patterns"))?;
    Ok((sens * spec).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub cc: f64,
    pub rmse: f64,
    pub aem: f64,
    pub si: f64,
}

/// Error-only metrics; defined whenever the inputs are non-empty and equal
/// in length. Used when CC or SI would be undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub rmse: f64,
    pub aem: f64,
}

pub fn error_metrics(predicted: &[f64], observed: &[f64]) -> Result<ErrorMetrics, MetricsError> {
    if predicted.len() != observed.len() {
        return Err(undefined(
            "rmse",
            format!("length mismatch {} vs {}", predicted.len(), observed.len()),
        ));
    }
    if predicted.is_empty() {
        return Err(undefined("rmse", "no patterns"));
    }
    let n = predicted.len() as f64;
    let (mut se, mut ae) = (0.0, 0.0);
    for (p, o) in predicted.iter().zip(observed) {
        let e = p - o;
        se += e * e;
        ae += e.abs();
    }
    Ok(ErrorMetrics { rmse: (se / n).sqrt(), aem: ae / n })
}

/// Pearson correlation coefficient.
pub fn pearson(predicted: &[f64], observed: &[f64]) -> Result<f64, MetricsError> {
    if predicted.len() != observed.len() || predicted.len() < 2 {
        return Err(undefined("cc", "need two equal-length series of at least 2 values"));
    }
    let (mp, mo) = (stats::mean(predicted), stats::mean(observed));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, o) in predicted.iter().zip(observed) {
        let (dp, dob) = (p - mp, o - mo);
        sxy += dp * dob;
        sxx += dp * dp;
        syy += dob * dob;
    }
    if sxx == 0.0 {
        return Err(undefined("cc", "predicted values are constant"));
    }
    if syy == 0.0 {
        return Err(undefined("cc", "observed values are constant"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn regression_metrics(predicted: &[f64], observed: &[f64]) -> Result<RegressionMetrics, MetricsError> {
    let ErrorMetrics { rmse, aem } = error_metrics(predicted, observed)?;
    let mean_obs = stats::mean(observed);
    if mean_obs == 0.0 {
        return Err(undefined("si", "observed mean is zero"));
    }
    let cc = pearson(predicted, observed)?;
    Ok(RegressionMetrics { cc, rmse, aem, si: rmse / mean_obs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g_metric_examples() {
        let perfect = ConfusionCounts { tp: 5, fp: 0, tn: 40, fn_: 0 };
        assert_eq!(g_metric_means(&perfect).unwrap(), 1.0);
        let c = ConfusionCounts { tp: 8, fn_: 2, tn: 9, fp: 1 };
        assert!((g_metric_means(&c).unwrap() - 0.72f64.sqrt()).abs() < 1e-15);
        let all_positive = ConfusionCounts { tp: 6, fp: 94, tn: 0, fn_: 0 };
        assert_eq!(g_metric_means(&all_positive).unwrap(), 0.0);
        let no_pos = ConfusionCounts { tp: 0, fp: 3, tn: 5, fn_: 0 };
        assert!(matches!(g_metric_means(&no_pos), Err(MetricsError::UndefinedMetric { .. })));
    }

    #[test]
    fn confusion_from_labels() {
        use ClassLabel::*;
        let c = ConfusionCounts::from_labels(&[NonZero, NonZero, Zero, Zero], &[NonZero, Zero, NonZero, Zero]);
        assert_eq!(c, ConfusionCounts { tp: 1, fp: 1, tn: 1, fn_: 1 });
        assert_eq!(c.total(), 4);
    }

    #[test]
    fn perfect_prediction() {
        let o = [0.1, 0.4, 0.3];
        let m = regression_metrics(&o, &o).unwrap();
        assert_eq!((m.rmse, m.aem, m.si), (0.0, 0.0, 0.0));
        assert!((m.cc - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_example() {
        let (obs, pred) = ([0.2, 0.4], [0.3, 0.3]);
        let e = error_metrics(&pred, &obs).unwrap();
        assert!((e.rmse - 0.1).abs() < 1e-15);
        assert!((e.aem - 0.1).abs() < 1e-15);
        assert!((e.rmse / stats::mean(&obs) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            regression_metrics(&pred, &obs).unwrap_err(),
            MetricsError::UndefinedMetric { which: "cc", reason: "predicted values are constant".into() }
        );
    }

    #[test]
    fn constant_shift() {
        let obs = [0.1, 0.5, 0.2, 0.7];
        let pred: Vec<f64> = obs.iter().map(|o| o + 0.05).collect();
        let m = regression_metrics(&pred, &obs).unwrap();
        assert!((m.cc - 1.0).abs() < 1e-12);
        assert!((m.aem - 0.05).abs() < 1e-12);
        assert!((m.rmse - 0.05).abs() < 1e-12);
        assert!(regression_metrics(&[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn aem_never_exceeds_rmse(pairs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..50)) {
            let (p, o): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let e = error_metrics(&p, &o).unwrap();
            prop_assert!(e.aem <= e.rmse + 1e-15);
        }

        #[test]
        fn g_is_symmetric_under_class_swap(tp in 1u64..100, fp in 0u64..100, tn in 1u64..100, fn_ in 0u64..100) {
            let c = ConfusionCounts { tp, fp, tn, fn_ };
            let swapped = ConfusionCounts { tp: tn, fp: fn_, tn: tp, fn_: fp };
            prop_assert!((g_metric_means(&c).unwrap() - g_metric_means(&swapped).unwrap()).abs() < 1e-15);
        }
    }
}
