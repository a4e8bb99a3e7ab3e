use serde::{Deserialize, Serialize};

use super::SvmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Gaussian radial basis `exp(-|x - y|² / (2 σ²))`.
    Rbf,
    /// Plain dot product.
    Linear,
    /// Multilayer-perceptron (sigmoid) kernel `tanh(scale · x·y + offset)`.
    /// Not positive semi-definite in general.
    Mlp,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Rbf => "rbf",
            KernelKind::Linear => "linear",
            KernelKind::Mlp => "mlp",
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rbf" => Ok(KernelKind::Rbf),
            "linear" => Ok(KernelKind::Linear),
            "mlp" => Ok(KernelKind::Mlp),
            other => Err(format!("unknown kernel `{other}` (expected rbf, linear or mlp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// σ of the rbf kernel.
    pub rbf_width: f64,
    pub mlp_scale: f64,
    pub mlp_offset: f64,
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self { kind: KernelKind::Rbf, rbf_width: 1.0, mlp_scale: 1.0, mlp_offset: -1.0 }
    }
}

impl KernelSpec {
    pub fn rbf(width: f64) -> Self {
        Self { kind: KernelKind::Rbf, rbf_width: width, ..Self::default() }
    }

    pub fn linear() -> Self {
        Self { kind: KernelKind::Linear, ..Self::default() }
    }

    pub fn mlp(scale: f64, offset: f64) -> Self {
        Self { kind: KernelKind::Mlp, mlp_scale: scale, mlp_offset: offset, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.rbf_width > 0.0 && self.rbf_width.is_finite()) {
            return Err(SvmError::InvalidConfig(format!("rbf_width {} must be > 0", self.rbf_width)));
        }
        if !(self.mlp_scale.is_finite() && self.mlp_offset.is_finite()) {
            return Err(SvmError::InvalidConfig("mlp parameters must be finite".into()));
        }
        Ok(())
    }

    /// Kernel value; dimensions are assumed equal.
    #[inline]
    pub fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Rbf => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * self.rbf_width * self.rbf_width)).exp()
            }
            KernelKind::Linear => dot(x, y),
            KernelKind::Mlp => (self.mlp_scale * dot(x, y) + self.mlp_offset).tanh(),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64, SvmError> {
        if x.len() != y.len() {
            return Err(SvmError::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        Ok(self.eval_unchecked(x, y))
    }
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
