//! Statistics-matched synthetic well logs.
//!
//! Every record is drawn from a lithofacies. Each facies fixes a linguistic
//! level (low / medium / high) per log; a level is a Gaussian bump centred at
//! the 15th / 50th / 85th percent point of the log's physical range
//! ([`LOG_RANGES`]). Zero-saturation records come from shale (the first
//! low-saturation expert configuration), tight rock (the second), water sand
//! and a shaly transition facies. Oil-bearing records come from clean oil
//! sand (the high-saturation configuration), whose resistivity rises with
//! saturation the way Archie's law predicts: at the target mean non-zero
//! saturation it sits on the medium level.
//!
//! Non-zero saturations follow an exponential-family density
//! `p(s) ∝ exp(-rate · s)` truncated to `(zero_threshold, max_saturation]`,
//! with `rate` solved so the mean hits `nonzero_mean_target`. When the
//! target exceeds the midpoint of the interval the rate is negative and the
//! density increases towards `max_saturation`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetError, WellLogRecord, DEFAULT_ZERO_THRESHOLD, N_PREDICTORS};

/// Overall mean saturation the default generator reproduces.
pub const TARGET_OVERALL_MEAN: f64 = 0.0391;
/// Zero-saturation share of the reference field.
pub const TARGET_ZERO_FRACTION: f64 = 0.9355;
/// Largest saturation observed in the reference field.
pub const TARGET_MAX_SATURATION: f64 = 0.86;

/// Physical span of one log; the linguistic levels sit at 15/50/85 % of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRange {
    pub min: f64,
    pub max: f64,
}

impl LogRange {
    pub fn at(&self, position: f64) -> f64 {
        self.min + position * (self.max - self.min)
    }
}

/// gamma ray (API), resistivity (ohm-m), density (g/cc), clay volume (v/v).
pub const LOG_RANGES: [LogRange; N_PREDICTORS] = [
    LogRange { min: 15.0, max: 165.0 },
    LogRange { min: 1.0, max: 41.0 },
    LogRange { min: 1.95, max: 2.75 },
    LogRange { min: 0.0, max: 0.6 },
];

/// Normalized positions of the low / medium / high bumps.
const LEVEL_POSITIONS: [f64; 3] = [0.15, 0.50, 0.85];
/// Standard deviation of a level bump, as a fraction of the log range.
const LEVEL_SPREAD: f64 = 0.07;

const LOW: usize = 0;
const MEDIUM: usize = 1;
const HIGH: usize = 2;

/// Zero-saturation facies: (levels for gamma, resistivity, density, clay; weight).
const ZERO_FACIES: [([usize; 4], f64); 4] = [
    // shale
    ([HIGH, LOW, HIGH, HIGH], 0.30),
    // tight
    ([HIGH, HIGH, HIGH, LOW], 0.25),
    // water sand
    ([LOW, LOW, LOW, LOW], 0.10),
    // shaly transition
    ([MEDIUM, MEDIUM, MEDIUM, MEDIUM], 0.35),
];

/// Oil sand levels; resistivity is replaced by the saturation-driven position.
const OIL_SAND: [usize; 4] = [LOW, MEDIUM, LOW, LOW];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n_records: usize,
    pub zero_fraction: f64,
    /// Mean of the non-zero saturations. `None` derives it so the overall
    /// mean is [`TARGET_OVERALL_MEAN`].
    pub nonzero_mean_target: Option<f64>,
    pub max_saturation: f64,
    /// Additive Gaussian noise on every log, as a fraction of its range.
    pub noise_sigma: f64,
    pub seed: u64,
    pub n_wells: usize,
    pub zero_threshold: f64,
    /// Wells whose recorded saturation is forced to zero regardless of logs.
    pub all_zero_wells: Vec<String>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_records: 5000,
            zero_fraction: TARGET_ZERO_FRACTION,
            nonzero_mean_target: None,
            max_saturation: TARGET_MAX_SATURATION,
            noise_sigma: 0.05,
            seed: 0,
            n_wells: 4,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
            all_zero_wells: Vec::new(),
        }
    }
}

impl SyntheticSpec {
    pub fn nonzero_mean(&self) -> f64 {
        self.nonzero_mean_target
            .unwrap_or(TARGET_OVERALL_MEAN / (1.0 - self.zero_fraction))
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: String| Err(DatasetError::InvalidSpec(m));
        if self.n_records == 0 {
            return bad("n_records must be positive".into());
        }
        if self.n_wells == 0 || self.n_wells > self.n_records {
            return bad(format!("n_wells {} must be in 1..=n_records", self.n_wells));
        }
        if !(0.0..1.0).contains(&self.zero_fraction) {
            return bad(format!("zero_fraction {} not in [0, 1)", self.zero_fraction));
        }
        if !(self.zero_threshold >= 0.0 && self.max_saturation > self.zero_threshold)
            || self.max_saturation > 1.0
        {
            return bad(format!(
                "need zero_threshold < max_saturation <= 1, got {} and {}",
                self.zero_threshold, self.max_saturation
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma {} must be >= 0", self.noise_sigma));
        }
        let m = self.nonzero_mean();
        if !(m > self.zero_threshold && m < self.max_saturation) {
            return bad(format!(
                "non-zero mean {m} must lie inside ({}, {})",
                self.zero_threshold, self.max_saturation
            ));
        }
        for w in &self.all_zero_wells {
            if !(0..self.n_wells).any(|k| well_name(k) == *w) {
                return bad(format!("unknown well `{w}` in all_zero_wells"));
            }
        }
        Ok(())
    }
}

/// Well ids `A`, `B`, ... `Z`, then `W26`, `W27`, ...
fn well_name(k: usize) -> String {
    if k < 26 {
        char::from(b'A' + k as u8).to_string()
    } else {
        format!("W{k}")
    }
}

/// Truncated exponential-family distribution on `[lo, lo + width]`.
#[derive(Debug, Clone, Copy)]
struct TruncatedExp {
    lo: f64,
    width: f64,
    rate: f64,
}

impl TruncatedExp {
    fn mean_offset(rate: f64, width: f64) -> f64 {
        let t = rate * width;
        if t.abs() < 1e-6 {
            width / 2.0 - t * width / 12.0
        } else {
            1.0 / rate - width / t.exp_m1()
        }
    }

    /// Solves for the rate matching `mean`; the mean offset is strictly
    /// decreasing in the rate.
    fn with_mean(lo: f64, hi: f64, mean: f64) -> Self {
        let width = hi - lo;
        let target = mean - lo;
        let (mut a, mut b) = (-1e4 / width, 1e4 / width);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if Self::mean_offset(mid, width) > target {
                a = mid;
            } else {
                b = mid;
            }
        }
        Self { lo, width, rate: 0.5 * (a + b) }
    }

    /// Inverse-CDF draw from `u ∈ (0, 1]`, landing in `(lo, lo + width]`.
    fn quantile(&self, u: f64) -> f64 {
        let t = self.rate * self.width;
        let y = if t.abs() < 1e-12 {
            u * self.width
        } else {
            -(u * (-t).exp_m1()).ln_1p() / self.rate
        };
        // Strictly above `lo` even when `y` is below its rounding step.
        (self.lo + y.clamp(0.0, self.width)).max(self.lo.next_up())
    }
}

/// Generates a synthetic dataset; fully determined by `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    let n = spec.n_records;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let n_zero = (spec.zero_fraction * n as f64).round() as usize;
    let mut is_zero: Vec<bool> = (0..n).map(|i| i < n_zero).collect();
    is_zero.shuffle(&mut rng);

    let nonzero_mean = spec.nonzero_mean();
    let saturation_law = TruncatedExp::with_mean(spec.zero_threshold, spec.max_saturation, nonzero_mean);
    let zero_weight_total: f64 = ZERO_FACIES.iter().map(|(_, w)| w).sum();

    let mut records = Vec::with_capacity(n);
    for (i, &zero) in is_zero.iter().enumerate() {
        let well = i * spec.n_wells / n;
        let first_in_well = (well * n).div_ceil(spec.n_wells);
        let depth = 1500.0 + 37.0 * well as f64 + 0.1524 * (i - first_in_well) as f64;

        let (positions, saturation) = if zero {
            let mut pick = rng.random::<f64>() * zero_weight_total;
            let mut levels = ZERO_FACIES[ZERO_FACIES.len() - 1].0;
            for (l, w) in ZERO_FACIES {
                if pick < w {
                    levels = l;
                    break;
                }
                pick -= w;
            }
            (levels.map(|l| LEVEL_POSITIONS[l]), 0.0)
        } else {
            let s = saturation_law.quantile(1.0 - rng.random::<f64>());
            let mut pos = OIL_SAND.map(|l| LEVEL_POSITIONS[l]);
            pos[1] = LEVEL_POSITIONS[LOW]
                + (LEVEL_POSITIONS[MEDIUM] - LEVEL_POSITIONS[LOW]) * (s / nonzero_mean);
            (pos, s)
        };

        let mut logs = [0.0; N_PREDICTORS];
        for k in 0..N_PREDICTORS {
            let bump: f64 = rng.sample(StandardNormal);
            let noise: f64 = rng.sample(StandardNormal);
            let p = positions[k] + LEVEL_SPREAD * bump + spec.noise_sigma * noise;
            logs[k] = LOG_RANGES[k].at(p);
        }
        let well_id = well_name(well);
        let saturation = if spec.all_zero_wells.contains(&well_id) { 0.0 } else { saturation };
        records.push(WellLogRecord {
            well_id,
            depth: Some(depth),
            gamma_ray: logs[0],
            resistivity: logs[1].max(0.1),
            density: logs[2].max(0.5),
            clay_volume: logs[3].clamp(0.0, 1.0),
            oil_saturation: saturation,
        });
    }
    Dataset::new(format!("synthetic-{}", spec.seed), records)
}
