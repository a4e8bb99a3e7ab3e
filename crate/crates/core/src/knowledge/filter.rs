use std::fmt;

use serde::{Deserialize, Serialize};

use super::{KnowledgeBase, OutputMemberships, SaturationLevel};
use crate::dataset::{ClassLabel, N_PREDICTORS};

/// Defuzzification is refused when the modified grades sum below this.
const MIN_GRADE_SUM: f64 = 1e-12;

/// Per-rule activations plus the two aggregated strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleActivations {
    pub per_rule: Vec<f64>,
    /// Max over rules concluding "saturation low".
    pub act_low: f64,
    /// Max over rules concluding "saturation high".
    pub act_high: f64,
}

impl RuleActivations {
    /// Names of rules above `tau` supporting `level`, joined with `+`.
    fn fired(&self, kb: &KnowledgeBase, level: SaturationLevel) -> String {
        kb.rules
            .iter()
            .zip(&self.per_rule)
            .filter(|(r, &a)| r.saturation == level && a > kb.activation_threshold)
            .map(|(r, _)| r.name.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }

    fn fired_any(&self, kb: &KnowledgeBase) -> String {
        kb.rules
            .iter()
            .zip(&self.per_rule)
            .filter(|(_, &a)| a > kb.activation_threshold)
            .map(|(r, _)| r.name.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Min t-norm of each rule's antecedent grades at the raw predictor values.
pub fn rule_activation(kb: &KnowledgeBase, raw: &[f64; N_PREDICTORS]) -> RuleActivations {
    let per_rule: Vec<f64> = kb
        .rules
        .iter()
        .map(|rule| {
            rule.antecedent()
                .iter()
                .enumerate()
                .map(|(k, &lvl)| kb.partition.terms[k].term(lvl).grade(raw[k]))
                .fold(1.0, f64::min)
        })
        .collect();
    let strongest = |level| {
        kb.rules
            .iter()
            .zip(&per_rule)
            .filter(|(r, _)| r.saturation == level)
            .map(|(_, &a)| a)
            .fold(0.0, f64::max)
    };
    let act_low = strongest(SaturationLevel::Low);
    let act_high = strongest(SaturationLevel::High);
    RuleActivations { per_rule, act_low, act_high }
}

/// Why the filter did or did not change an output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rules", rename_all = "snake_case")]
pub enum FilterReason {
    PassThrough,
    /// Names of the rules responsible, e.g. `R1` or `R1+R3`.
    Fired(String),
    /// Rules fired but both output grades collapsed; the prediction was kept.
    DegenerateGrades(String),
    /// No rule fired; the pipeline clipped an infeasible value into `[0, 1]`.
    RangeClamp,
}

impl FilterReason {
    pub fn changed_something(&self) -> bool {
        matches!(self, FilterReason::Fired(_) | FilterReason::RangeClamp)
    }
}

impl fmt::Display for FilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterReason::PassThrough => f.write_str("pass-through"),
            FilterReason::Fired(r) => f.write_str(r),
            FilterReason::DegenerateGrades(r) => write!(f, "degenerate-grades({r})"),
            FilterReason::RangeClamp => f.write_str("range-clamp"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassRefinement {
    pub label: ClassLabel,
    pub reason: FilterReason,
}

/// Stage-1 correction. Class 1 drops to Class 0 when the "low" rules win
/// above τ; Class 0 rises to Class 1 when the "high" rules win above τ and
/// promotion is enabled.
pub fn refine_class(kb: &KnowledgeBase, raw: &[f64; N_PREDICTORS], svm_label: ClassLabel) -> ClassRefinement {
    let act = rule_activation(kb, raw);
    let tau = kb.activation_threshold;
    match svm_label {
        ClassLabel::NonZero if act.act_low > tau && act.act_low > act.act_high => ClassRefinement {
            label: ClassLabel::Zero,
            reason: FilterReason::Fired(act.fired(kb, SaturationLevel::Low)),
        },
        ClassLabel::Zero
            if kb.promote_to_nonzero && act.act_high > tau && act.act_high > act.act_low =>
        {
            ClassRefinement {
                label: ClassLabel::NonZero,
                reason: FilterReason::Fired(act.fired(kb, SaturationLevel::High)),
            }
        }
        label => ClassRefinement { label, reason: FilterReason::PassThrough },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NzCategory {
    Nzs,
    Nzb,
}

/// Category with the larger grade (ties go to NZS) and both grades.
pub fn categorize_nzs_nzb(om: &OutputMemberships, saturation: f64) -> (NzCategory, f64, f64) {
    let mu_nzs = om.nzs.grade(saturation);
    let mu_nzb = om.nzb.grade(saturation);
    let cat = if mu_nzs >= mu_nzb { NzCategory::Nzs } else { NzCategory::Nzb };
    (cat, mu_nzs, mu_nzb)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRefinement {
    pub saturation: f64,
    pub reason: FilterReason,
}

/// Stage-2 correction of a raw (denormalized) saturation prediction.
///
/// Active "low" rules push the NZS grade up to their strength and cap NZB
/// at its complement, "high" rules do the mirror image; the two-center
/// weighted average of the modified grades is the refined value, clamped to
/// `[zero_threshold, 1]`. With no rule above τ the input is returned as is.
pub fn refine_prediction(
    kb: &KnowledgeBase,
    om: &OutputMemberships,
    raw: &[f64; N_PREDICTORS],
    predicted: f64,
) -> PredictionRefinement {
    let act = rule_activation(kb, raw);
    let tau = kb.activation_threshold;
    if !(act.act_low > tau || act.act_high > tau) {
        return PredictionRefinement { saturation: predicted, reason: FilterReason::PassThrough };
    }

    let (_, mut mu_nzs, mut mu_nzb) = categorize_nzs_nzb(om, predicted);
    if act.act_low > tau {
        mu_nzs = mu_nzs.max(act.act_low);
        mu_nzb = mu_nzb.min(1.0 - act.act_low);
    }
    if act.act_high > tau {
        mu_nzb = mu_nzb.max(act.act_high);
        mu_nzs = mu_nzs.min(1.0 - act.act_high);
    }
    let fired = act.fired_any(kb);
    let total = mu_nzs + mu_nzb;
    // NaN grades (from a NaN prediction) also land here.
    if !(total >= MIN_GRADE_SUM) {
        return PredictionRefinement { saturation: predicted, reason: FilterReason::DegenerateGrades(fired) };
    }
    let s = (mu_nzs * om.nzs.center + mu_nzb * om.nzb.center) / total;
    PredictionRefinement { saturation: s.clamp(kb.zero_threshold, 1.0), reason: FilterReason::Fired(fired) }
}
