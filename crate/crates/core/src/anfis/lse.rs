use nalgebra::{DMatrix, DVector};

use super::{AnfisError, AnfisModel};

/// One row of the stacked regressor matrix: for every rule, the normalized
/// firing strength times `[x, 1]`. In the degenerate (no rule active) case
/// only the constant slots are set, each to `1 / rules`, matching the
/// forward fallback.
pub fn regressor_row(model: &AnfisModel, x: &[f64]) -> Vec<f64> {
    let d = model.n_inputs;
    let pass = model.forward_unchecked(x);
    let mut row = vec![0.0; model.n_consequent_params()];
    for (r, w) in pass.normalized.iter().enumerate() {
        let base = r * (d + 1);
        if !pass.degenerate {
            for (slot, xi) in row[base..base + d].iter_mut().zip(x) {
                *slot = w * xi;
            }
        }
        row[base + d] = *w;
    }
    row
}

fn design(model: &AnfisModel, inputs: &[Vec<f64>]) -> DMatrix<f64> {
    let p = model.n_consequent_params();
    let mut a = DMatrix::<f64>::zeros(inputs.len(), p);
    for (i, x) in inputs.iter().enumerate() {
        for (j, v) in regressor_row(model, x).into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    a
}

fn flatten(model: &AnfisModel) -> DVector<f64> {
    DVector::from_iterator(model.n_consequent_params(), model.consequents.iter().flatten().copied())
}

/// Gradient of `‖Aθ - y‖² + λ‖θ‖²` with respect to the consequents, at the
/// model's current consequents.
pub fn ridge_objective_gradient(
    model: &AnfisModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    ridge_lambda: f64,
) -> Vec<f64> {
    let a = design(model, inputs);
    let theta = flatten(model);
    let y = DVector::from_column_slice(targets);
    let g = (a.transpose() * (&a * &theta - y)) * 2.0 + &theta * (2.0 * ridge_lambda);
    g.iter().copied().collect()
}

/// Solves the ridge-regularized least-squares problem for the consequent
/// parameters with the premises held fixed, returning the new consequents.
pub fn lse_consequents(
    model: &AnfisModel,
    inputs: &[Vec<f64>],
    targets: &[f64],
    ridge_lambda: f64,
) -> Result<Vec<Vec<f64>>, AnfisError> {
    if inputs.is_empty() {
        return Err(AnfisError::TooFewPatterns { needed: 1, got: 0 });
    }
    if inputs.len() != targets.len() {
        return Err(AnfisError::DimensionMismatch { expected: inputs.len(), found: targets.len() });
    }
    if let Some(x) = inputs.iter().find(|x| x.len() != model.n_inputs) {
        return Err(AnfisError::DimensionMismatch { expected: model.n_inputs, found: x.len() });
    }
    let p = model.n_consequent_params();
    let a = design(model, inputs);
    let y = DVector::from_column_slice(targets);
    let at = a.transpose();
    let mut normal = &at * &a;
    for k in 0..p {
        normal[(k, k)] += ridge_lambda;
    }
    let rhs = &at * &y;

    let max_diag = (0..p).map(|k| normal[(k, k)]).fold(0.0, f64::max);
    let chol = normal
        .clone()
        .cholesky()
        .ok_or_else(|| AnfisError::NumericalFailure("normal matrix is not positive definite".into()))?;
    // A pivot at round-off level means the system is singular in practice.
    let pivot_floor = max_diag * p as f64 * f64::EPSILON;
    let l = chol.l();
    if let Some(k) = (0..p).find(|&k| l[(k, k)] * l[(k, k)] <= pivot_floor) {
        return Err(AnfisError::NumericalFailure(format!(
            "normal matrix is numerically singular at pivot {k}"
        )));
    }
    let mut theta = chol.solve(&rhs);
    // One step of iterative refinement.
    let residual = &rhs - &normal * &theta;
    theta += chol.solve(&residual);
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(AnfisError::NumericalFailure("non-finite consequent".into()));
    }

    let d1 = model.n_inputs + 1;
    Ok(theta.as_slice().chunks(d1).map(<[f64]>::to_vec).collect())
}
