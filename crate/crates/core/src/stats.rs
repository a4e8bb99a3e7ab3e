//! Small descriptive-statistics helpers shared by the scalers, the knowledge
//! filter and the metrics.

/// Arithmetic mean. Returns `NaN` for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with the `n - 1` denominator. Returns `NaN` for fewer
/// than two values.
pub fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

/// Population variance (denominator `n`).
pub fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Nearest-rank percentile: the smallest sample value such that at least
/// `p` percent of the sample is less than or equal to it.
///
/// With this convention the 25th and 75th percentiles of `{0.1, 0.5}` are
/// `0.1` and `0.5`, and the 10th/50th/90th percentiles of `{0, 1, ..., 100}`
/// are `10`, `50` and `90`.
///
/// `p` is clamped to `[0, 100]`; `p = 0` yields the minimum. Panics on an
/// empty slice.
pub fn percentile_nearest_rank(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile_of_sorted(&sorted, p)
}

/// [`percentile_nearest_rank`] over an already ascending-sorted slice.
pub fn percentile_of_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let p = p.clamp(0.0, 100.0);
    // Guard the product against representation error (0.7 * 100 etc).
    let rank = ((p / 100.0) * n as f64 - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(n) - 1]
}
