use super::{AnfisModel, GBellPartials};

/// Gradient of the summed squared error with respect to every premise
/// parameter, laid out like `AnfisModel::premises`.
#[derive(Debug, Clone, PartialEq)]
pub struct PremiseGradient {
    pub by_input: Vec<Vec<GBellPartials>>,
}

impl PremiseGradient {
    pub fn zeros(model: &AnfisModel) -> Self {
        Self { by_input: vec![vec![GBellPartials::default(); model.mfs_per_input]; model.n_inputs] }
    }

    /// Flattened `[a, b, c]` per membership function, inputs outermost.
    pub fn to_flat(&self) -> Vec<f64> {
        self.by_input.iter().flatten().flat_map(|g| [g.da, g.db, g.dc]).collect()
    }

    pub fn norm(&self) -> f64 {
        self.to_flat().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Back-propagates `Σ (prediction - target)²` through the normalized-weight
/// layer and the gbell memberships.
///
/// For one pattern with output `y = Σ_r w_r f_r / S`, `S = Σ_r w_r`:
/// `∂y/∂w_r = (f_r - y) / S` and `∂w_r/∂μ_ik` is the product of the rule's
/// other grades when rule `r` uses membership `k` of input `i`. Patterns on
/// the degenerate fallback contribute nothing.
pub fn premise_gradient(model: &AnfisModel, inputs: &[Vec<f64>], targets: &[f64]) -> PremiseGradient {
    let d = model.n_inputs;
    let mut grad = PremiseGradient::zeros(model);
    for (x, &t) in inputs.iter().zip(targets) {
        let pass = model.forward_unchecked(x);
        if pass.degenerate {
            continue;
        }
        let total: f64 = pass.firing.iter().sum();
        let de_dy = 2.0 * (pass.output - t);
        if de_dy == 0.0 {
            continue;
        }

        let grades = model.grades(x);
        // ∂E/∂μ_ik accumulated over rules
        let mut de_dmu = vec![vec![0.0; model.mfs_per_input]; d];
        for r in 0..model.n_rules() {
            let dy_dw = (pass.rule_outputs[r] - pass.output) / total;
            for i in 0..d {
                let others: f64 = (0..d)
                    .filter(|&j| j != i)
                    .map(|j| grades[j][model.rule_mf(r, j)])
                    .product();
                de_dmu[i][model.rule_mf(r, i)] += de_dy * dy_dw * others;
            }
        }

        for i in 0..d {
            for k in 0..model.mfs_per_input {
                let (_, dmu) = model.premises[i][k].grade_and_partials(x[i]);
                let g = &mut grad.by_input[i][k];
                g.da += de_dmu[i][k] * dmu.da;
                g.db += de_dmu[i][k] * dmu.db;
                g.dc += de_dmu[i][k] * dmu.dc;
            }
        }
    }
    grad
}
