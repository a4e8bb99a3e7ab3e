//! Platt's SMO with a full error cache.
//!
//! The first multiplier of each pair comes from alternating full / non-bound
//! scans over KKT violators. The second maximizes `|E1 - E2|` over the
//! non-bound set, falling back to non-bound and then full scans that start
//! at a seeded random offset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{KernelSpec, SvmError, SvmModel, SvmTrainConfig, TrainingMeta};

/// Full Gram matrices are cached up to this many training points.
const DENSE_CACHE_LIMIT: usize = 4096;

enum Gram<'a> {
    Dense { n: usize, k: Vec<f64> },
    OnTheFly { x: &'a [Vec<f64>], kernel: KernelSpec, diag: Vec<f64> },
}

impl Gram<'_> {
    fn new(x: &[Vec<f64>], kernel: KernelSpec) -> Gram<'_> {
        let n = x.len();
        if n <= DENSE_CACHE_LIMIT {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval_unchecked(&x[i], &x[j]);
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            Gram::Dense { n, k }
        } else {
            let diag = x.iter().map(|xi| kernel.eval_unchecked(xi, xi)).collect();
            Gram::OnTheFly { x, kernel, diag }
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Gram::Dense { n, k } => k[i * n + j],
            Gram::OnTheFly { x, kernel, diag } => {
                if i == j {
                    diag[i]
                } else {
                    kernel.eval_unchecked(&x[i], &x[j])
                }
            }
        }
    }
}

struct Smo<'a> {
    gram: Gram<'a>,
    y: &'a [f64],
    /// Per-point box constraint.
    bound: Vec<f64>,
    alpha: Vec<f64>,
    /// `Σ_j alpha_j y_j K(j, i)`, the decision value without bias.
    f: Vec<f64>,
    b: f64,
    tol: f64,
    eps: f64,
    iterations: usize,
    rng: ChaCha8Rng,
}

impl Smo<'_> {
    fn n(&self) -> usize {
        self.y.len()
    }

    #[inline]
    fn error(&self, i: usize) -> f64 {
        self.f[i] + self.b - self.y[i]
    }

    #[inline]
    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > self.eps && self.alpha[i] < self.bound[i] - self.eps
    }

    fn violates_kkt(&self, i: usize) -> bool {
        self.kkt_violation(i, self.b) > self.tol
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1_old, a2_old) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (c1, c2) = (self.bound[i1], self.bound[i2]);
        let (e1, e2) = (self.error(i1), self.error(i2));
        let s = y1 * y2;

        let (lo, hi) = if s < 0.0 {
            ((a2_old - a1_old).max(0.0), c2.min(c1 + a2_old - a1_old))
        } else {
            ((a1_old + a2_old - c1).max(0.0), c2.min(a1_old + a2_old))
        };
        if hi - lo <= 0.0 {
            return false;
        }

        let k11 = self.gram.get(i1, i1);
        let k12 = self.gram.get(i1, i2);
        let k22 = self.gram.get(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;
        let slope = y2 * (e1 - e2);

        let a2 = if eta > 0.0 {
            (a2_old + slope / eta).clamp(lo, hi)
        } else {
            // Non-convex direction (possible with the mlp kernel): take the
            // better end point of the segment.
            let gain = |a: f64| (a - a2_old) * slope - 0.5 * eta * (a - a2_old) * (a - a2_old);
            let (g_lo, g_hi) = (gain(lo), gain(hi));
            if g_lo > g_hi + self.eps {
                lo
            } else if g_hi > g_lo + self.eps {
                hi
            } else {
                a2_old
            }
        };
        if (a2 - a2_old).abs() < self.eps * (a2 + a2_old + self.eps) {
            return false;
        }
        let a1 = (a1_old + s * (a2_old - a2)).clamp(0.0, c1);

        let d1 = y1 * (a1 - a1_old);
        let d2 = y2 * (a2 - a2_old);
        let b1 = self.b - e1 - d1 * k11 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2 * k22;
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        self.b = if self.is_free(i1) {
            b1
        } else if self.is_free(i2) {
            b2
        } else {
            0.5 * (b1 + b2)
        };

        for i in 0..self.n() {
            self.f[i] += d1 * self.gram.get(i1, i) + d2 * self.gram.get(i2, i);
        }
        self.iterations += 1;
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        if !self.violates_kkt(i2) {
            return false;
        }
        let n = self.n();
        let e2 = self.error(i2);

        let mut best: Option<(usize, f64)> = None;
        let mut n_free = 0;
        for i in 0..n {
            if self.is_free(i) {
                n_free += 1;
                let gap = (self.error(i) - e2).abs();
                if best.is_none_or(|(_, g)| gap > g) {
                    best = Some((i, gap));
                }
            }
        }
        if n_free > 1 {
            if let Some((i1, _)) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }

        let start = self.rng.random_range(0..n);
        for k in 0..n {
            let i1 = (start + k) % n;
            if self.is_free(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        let start = self.rng.random_range(0..n);
        for k in 0..n {
            let i1 = (start + k) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    /// The bias minimizing the largest KKT violation.
    ///
    /// Each point bounds `b` from one side (both sides when its multiplier
    /// is free) and its violation is the distance past that bound, so the
    /// midpoint of the tightest lower and upper bounds is optimal.
    fn final_bias(&self) -> f64 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..self.n() {
            let need = self.y[i] - self.f[i];
            let at_zero = self.alpha[i] <= self.eps;
            let at_upper = self.alpha[i] >= self.bound[i] - self.eps;
            // y (f + b) >= 1 for alpha = 0, <= 1 at the upper bound, = 1 between.
            let positive = self.y[i] > 0.0;
            if !at_upper || at_zero {
                if positive { lo = lo.max(need) } else { hi = hi.min(need) }
            }
            if !at_zero {
                if positive { hi = hi.min(need) } else { lo = lo.max(need) }
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => self.b,
        }
    }

    fn kkt_violation(&self, i: usize, b: f64) -> f64 {
        let r = self.y[i] * (self.f[i] + b) - 1.0;
        if self.alpha[i] <= self.eps {
            (-r).max(0.0)
        } else if self.alpha[i] >= self.bound[i] - self.eps {
            r.max(0.0)
        } else {
            r.abs()
        }
    }
}

/// Trains a binary SVM. `labels` must be ±1 (Class 0 ↦ -1, Class 1 ↦ +1).
///
/// Hitting `max_iterations` is not an error: the model is returned with
/// `training_meta.converged == false`.
pub fn train_svm(
    inputs: &[Vec<f64>],
    labels: &[f64],
    kernel: KernelSpec,
    config: &SvmTrainConfig,
) -> Result<SvmModel, SvmError> {
    kernel.validate()?;
    config.validate()?;
    if inputs.len() != labels.len() {
        return Err(SvmError::DimensionMismatch { expected: inputs.len(), found: labels.len() });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(SvmError::InvalidLabel(bad));
    }
    let dim = inputs.first().map_or(0, Vec::len);
    if let Some(x) = inputs.iter().find(|x| x.len() != dim) {
        return Err(SvmError::DimensionMismatch { expected: dim, found: x.len() });
    }
    let n = labels.len();
    let n_pos = labels.iter().filter(|&&y| y > 0.0).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(SvmError::SingleClassInput);
    }

    let (box_neg, box_pos) = if config.class_weighting {
        (
            config.c * n as f64 / (2.0 * n_neg as f64),
            config.c * n as f64 / (2.0 * n_pos as f64),
        )
    } else {
        (config.c, config.c)
    };

    let mut smo = Smo {
        gram: Gram::new(inputs, kernel),
        y: labels,
        bound: labels.iter().map(|&y| if y > 0.0 { box_pos } else { box_neg }).collect(),
        alpha: vec![0.0; n],
        f: vec![0.0; n],
        b: 0.0,
        tol: config.kkt_tolerance,
        eps: config.numeric_epsilon,
        iterations: 0,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
    };

    let mut examine_all = true;
    let mut quiet_full_sweeps = 0;
    let mut converged = false;
    while smo.iterations < config.max_iterations {
        let mut changed = 0usize;
        for i in 0..n {
            if smo.iterations >= config.max_iterations {
                break;
            }
            if (examine_all || smo.is_free(i)) && smo.examine(i) {
                changed += 1;
            }
        }
        if examine_all {
            if changed == 0 {
                quiet_full_sweeps += 1;
                // The running bias only tracks the last pair; re-seat it
                // before judging the remaining violators.
                smo.b = smo.final_bias();
                let clean = !(0..n).any(|i| smo.violates_kkt(i));
                if clean || quiet_full_sweeps >= config.max_passes {
                    converged = clean;
                    break;
                }
            } else {
                quiet_full_sweeps = 0;
            }
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }

    let bias = smo.final_bias();
    let max_kkt_violation = (0..n).map(|i| smo.kkt_violation(i, bias)).fold(0.0, f64::max);
    let dual_objective = smo.alpha.iter().sum::<f64>()
        - 0.5 * (0..n).map(|i| smo.alpha[i] * smo.y[i] * smo.f[i]).sum::<f64>();

    let mut support_vectors = Vec::new();
    let mut dual_coefficients = Vec::new();
    for i in 0..n {
        if smo.alpha[i] > config.numeric_epsilon {
            support_vectors.push(inputs[i].clone());
            dual_coefficients.push(smo.alpha[i] * labels[i]);
        }
    }
    Ok(SvmModel {
        kernel,
        support_vectors,
        dual_coefficients,
        bias,
        training_meta: TrainingMeta {
            iterations: smo.iterations,
            dual_objective,
            converged,
            max_kkt_violation,
            box_negative: box_neg,
            box_positive: box_pos,
        },
    })
}
