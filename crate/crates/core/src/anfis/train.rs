use super::{lse_consequents, premise_gradient, AnfisConfig, AnfisError, AnfisModel, GBellParams};

/// Lower bound kept on every `a` and `b` after a premise step.
const MIN_SHAPE: f64 = 1e-6;

/// Grid initialization: per input, centers equally spaced over the observed
/// range, half-width equal to half the spacing (adjacent functions cross at
/// grade 0.5), slope `b = 2`.
pub fn initial_model(inputs: &[Vec<f64>], mfs_per_input: usize) -> AnfisModel {
    let d = inputs.first().map_or(0, Vec::len);
    let premises = (0..d)
        .map(|i| {
            let lo = inputs.iter().map(|x| x[i]).fold(f64::INFINITY, f64::min);
            let hi = inputs.iter().map(|x| x[i]).fold(f64::NEG_INFINITY, f64::max);
            // A constant input still needs a usable universe.
            let (lo, range) = if hi > lo { (lo, hi - lo) } else { (lo - 0.5, 1.0) };
            let spacing = range / (mfs_per_input - 1) as f64;
            (0..mfs_per_input)
                .map(|k| GBellParams::new(spacing / 2.0, 2.0, lo + k as f64 * spacing))
                .collect()
        })
        .collect();
    AnfisModel::with_premises(premises)
}

fn apply_step(model: &mut AnfisModel, flat_grad: &[f64], step: f64) {
    let norm = flat_grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return;
    }
    let scale = step / norm;
    for (p, g) in model.premises.iter_mut().flatten().zip(flat_grad.chunks(3)) {
        p.a = (p.a - scale * g[0]).max(MIN_SHAPE);
        p.b = (p.b - scale * g[1]).max(MIN_SHAPE);
        p.c -= scale * g[2];
    }
}

/// Step-size schedule: grow after four straight error decreases, shrink
/// after two consecutive up/down oscillations. History since the last
/// change only.
struct StepSchedule {
    step: f64,
    since_change: Vec<f64>,
}

impl StepSchedule {
    fn observe(&mut self, error: f64, config: &AnfisConfig) {
        self.since_change.push(error);
        let h = &self.since_change;
        if h.len() < 5 {
            return;
        }
        let tail = &h[h.len() - 5..];
        let diffs: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
        if diffs.iter().all(|&d| d < 0.0) {
            self.step *= config.step_increase;
            self.since_change.clear();
            self.since_change.push(error);
        } else if diffs.windows(2).all(|w| w[0] * w[1] < 0.0) {
            self.step *= config.step_decrease;
            self.since_change.clear();
            self.since_change.push(error);
        }
    }
}

/// Hybrid training. Each epoch refits the consequents by least squares,
/// records the training RMSE, then takes one normalized gradient step on
/// the premises. Returns the epoch with the lowest RMSE.
pub fn train_anfis(inputs: &[Vec<f64>], targets: &[f64], config: &AnfisConfig) -> Result<AnfisModel, AnfisError> {
    config.validate()?;
    if inputs.len() < 2 {
        return Err(AnfisError::TooFewPatterns { needed: 2, got: inputs.len() });
    }
    if inputs.len() != targets.len() {
        return Err(AnfisError::DimensionMismatch { expected: inputs.len(), found: targets.len() });
    }
    let d = inputs[0].len();
    if let Some(x) = inputs.iter().find(|x| x.len() != d) {
        return Err(AnfisError::DimensionMismatch { expected: d, found: x.len() });
    }

    let mut model = initial_model(inputs, config.mfs_per_input);
    let mut history = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, AnfisModel)> = None;
    let mut schedule = StepSchedule { step: config.initial_step, since_change: Vec::new() };

    for _ in 0..config.epochs {
        model.consequents = lse_consequents(&model, inputs, targets, config.ridge_lambda)?;
        let rmse = model.rmse(inputs, targets);
        history.push(rmse);
        if best.as_ref().is_none_or(|(b, _)| rmse < *b) {
            best = Some((rmse, model.clone()));
        }
        schedule.observe(rmse, config);

        let grad = premise_gradient(&model, inputs, targets).to_flat();
        apply_step(&mut model, &grad, schedule.step);
        debug_assert!(model.premises_valid());
    }

    let (_, mut best) = best.expect("at least one epoch");
    best.training_history = history;
    Ok(best)
}
