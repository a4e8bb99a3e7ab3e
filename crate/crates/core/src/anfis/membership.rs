use serde::{Deserialize, Serialize};

/// Generalized bell membership `1 / (1 + |(x - c) / a|^(2b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GBellParams {
    /// Half-width: the grade is 0.5 at `c ± a`.
    pub a: f64,
    /// Slope exponent.
    pub b: f64,
    /// Center.
    pub c: f64,
}

/// Partial derivatives of the membership grade.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GBellPartials {
    pub da: f64,
    pub db: f64,
    pub dc: f64,
}

impl GBellParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn is_valid(&self) -> bool {
        self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }

    #[inline]
    pub fn grade(&self, x: f64) -> f64 {
        let z = ((x - self.c) / self.a).abs();
        1.0 / (1.0 + z.powf(2.0 * self.b))
    }

    /// Grade and its partials in `a`, `b`, `c`.
    ///
    /// With `g = grade(x)`, `g (1 - g) = |z|^(2b) g²`, which gives
    /// `∂g/∂a = 2b g (1-g) / a`, `∂g/∂c = 2b g (1-g) / (x - c)` and
    /// `∂g/∂b = -2 g (1-g) ln|z|`. At `x = c` the `c` and `b` partials take
    /// their limit value 0.
    pub fn grade_and_partials(&self, x: f64) -> (f64, GBellPartials) {
        let diff = x - self.c;
        let z = (diff / self.a).abs();
        let g = 1.0 / (1.0 + z.powf(2.0 * self.b));
        if diff == 0.0 || z == 0.0 {
            return (g, GBellPartials::default());
        }
        let gg = g * (1.0 - g);
        (
            g,
            GBellPartials {
                da: 2.0 * self.b * gg / self.a,
                db: -2.0 * gg * z.ln(),
                dc: 2.0 * self.b * gg / diff,
            },
        )
    }
}

/// Free-function form of [`GBellParams::grade`].
pub fn gbell(x: f64, p: &GBellParams) -> f64 {
    p.grade(x)
}
