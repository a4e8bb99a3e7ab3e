//! Helpers shared by the integration tests: an independent dense QP solver
//! for the SVM dual and the seeded multi-run experiment.

#![allow(dead_code)]

use dkfis::dataset::{generate_synthetic, split, SyntheticSpec};
use dkfis::pipeline::{evaluate, train_pipeline, EvaluationReport, PipelineConfig};
use dkfis::svm::{KernelSpec, SvmModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random 2-D binary problem with both classes present.
pub fn random_problem(seed: u64, max_points: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(6..=max_points);
    loop {
        let shift: f64 = rng.random_range(0.0..1.5);
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let label = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            x.push(vec![
                rng.random_range(-1.0..1.0) + label * shift,
                rng.random_range(-1.0..1.0),
            ]);
            y.push(label);
        }
        if y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0) {
            return (x, y);
        }
    }
}

/// `Σ α - ½ αᵀ Q α` with `Q_ij = y_i y_j K(x_i, x_j)`.
pub fn dual_objective(q: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * q[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

pub fn signed_gram(x: &[Vec<f64>], y: &[f64], kernel: &KernelSpec) -> Vec<Vec<f64>> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| x.iter().zip(y).map(|(xj, yj)| yi * yj * kernel.eval(xi, xj).unwrap()).collect())
        .collect()
}

/// Euclidean projection onto `{0 ≤ α ≤ bound, yᵀα = 0}`, found by bisection
/// on the multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], bound: &[f64]) -> Vec<f64> {
    let at = |nu: f64| -> Vec<f64> { v.iter().zip(y).zip(bound).map(|((vi, yi), c)| (vi - nu * yi).clamp(0.0, *c)).collect() };
    let residual = |nu: f64| -> f64 { at(nu).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    // residual is non-increasing in nu
    let (mut lo, mut hi) = (-1.0, 1.0);
    while residual(lo) < 0.0 {
        lo *= 2.0;
    }
    while residual(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Maximizes the SVM dual by accelerated projected gradient until the
/// projected-gradient step is below `tol`.
pub fn qp_oracle(q: &[Vec<f64>], y: &[f64], bound: &[f64], tol: f64) -> Vec<f64> {
    let n = y.len();
    // Lipschitz constant of the gradient: Gershgorin bound on Q
    let lip = q.iter().map(|row| row.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max).max(1e-12);
    let grad = |a: &[f64]| -> Vec<f64> { (0..n).map(|i| 1.0 - (0..n).map(|j| q[i][j] * a[j]).sum::<f64>()).collect() };
    let mut alpha = vec![0.0; n];
    let mut momentum = alpha.clone();
    let mut t = 1.0f64;
    for _ in 0..2_000_000 {
        let g = grad(&momentum);
        let step: Vec<f64> = momentum.iter().zip(&g).map(|(a, gi)| a + gi / lip).collect();
        let next = project(&step, y, bound);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        // restart momentum whenever the objective drops
        let restart = dual_objective(q, &next) < dual_objective(q, &alpha);
        momentum = if restart {
            t = 1.0;
            next.clone()
        } else {
            t = t_next;
            next.iter().zip(&alpha).map(|(a, prev)| a + beta * (a - prev)).collect()
        };
        alpha = next;

        let g = grad(&alpha);
        let probe: Vec<f64> = alpha.iter().zip(&g).map(|(a, gi)| a + gi / lip).collect();
        let moved = project(&probe, y, bound);
        let gap = moved.iter().zip(&alpha).map(|(m, a)| (m - a).abs()).fold(0.0, f64::max) * lip;
        if gap < tol {
            break;
        }
    }
    alpha
}

/// Recovers `α` per training point from a model's support vectors.
pub fn alphas_from_model(model: &SvmModel, x: &[Vec<f64>]) -> Vec<f64> {
    x.iter()
        .map(|xi| {
            model
                .support_vectors
                .iter()
                .position(|sv| sv == xi)
                .map_or(0.0, |k| model.dual_coefficients[k].abs())
        })
        .collect()
}

/// Largest KKT violation of the trained model in margin units.
pub fn max_kkt_violation(model: &SvmModel, x: &[Vec<f64>], y: &[f64], bound: &[f64]) -> f64 {
    let alpha = alphas_from_model(model, x);
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let margin = y[i] * model.decision(&x[i]).unwrap() - 1.0;
        let v = if alpha[i] <= 0.0 {
            (-margin).max(0.0)
        } else if alpha[i] >= bound[i] - 1e-12 {
            margin.max(0.0)
        } else {
            margin.abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// One run of the synthetic experiment: default generator with `seed`,
/// split with the same seed, default pipeline with `kernel`.
pub fn synthetic_run(seed: u64, kernel: KernelSpec) -> EvaluationReport {
    let data = generate_synthetic(&SyntheticSpec { seed, ..SyntheticSpec::default() }).unwrap();
    let mut config = PipelineConfig::default();
    config.split.seed = seed;
    config.svm.kernel = kernel;
    let (train, test) = split(&data, &config.split).unwrap();
    let bundle = train_pipeline(&train, &config).unwrap();
    evaluate(&bundle, &test).unwrap()
}

/// `synthetic_run` for every seed, in parallel, in seed order.
pub fn synthetic_runs(seeds: impl IntoIterator<Item = u64>, kernel: KernelSpec) -> Vec<EvaluationReport> {
    let seeds: Vec<u64> = seeds.into_iter().collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = seeds.iter().map(|&seed| s.spawn(move || synthetic_run(seed, kernel))).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}
