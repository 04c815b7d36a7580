use rand::Rng;
use serde::{Deserialize, Serialize};

use super::error::{Result, StatsError};
use super::gamma::gamma;

/// Two-parameter Weibull law with density
/// `f(x) = shape * scale^-shape * x^(shape-1) * exp(-(x/scale)^shape)` on x > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct WeibullModel {
    shape: f64,
    scale: f64,
}

#[derive(Deserialize)]
struct RawModel {
    shape: f64,
    scale: f64,
}

impl TryFrom<RawModel> for WeibullModel {
    type Error = StatsError;

    fn try_from(raw: RawModel) -> Result<Self> {
        WeibullModel::new(raw.shape, raw.scale)
    }
}

impl WeibullModel {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0 && scale.is_finite() && scale > 0.0) {
            return Err(StatsError::InvalidModel { shape, scale });
        }
        Ok(WeibullModel { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The constant `shape * scale^-shape` in front of the density.
    pub fn pdf_coefficient(&self) -> f64 {
        self.shape * self.scale.powf(-self.shape)
    }

    /// Density at `x`. Zero for x < 0. At x = 0 the value is 0 for shape > 1,
    /// `1/scale` for shape = 1 and `f64::INFINITY` for shape < 1.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.shape.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Greater) => 0.0,
                Some(std::cmp::Ordering::Equal) => 1.0 / self.scale,
                _ => f64::INFINITY,
            };
        }
        let z = (x / self.scale).powf(self.shape);
        self.pdf_coefficient() * x.powf(self.shape - 1.0) * (-z).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        -(-(x / self.scale).powf(self.shape)).exp_m1()
    }

    /// Inverse of [`cdf`](Self::cdf) for p in [0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        self.scale * (-(-p).ln_1p()).powf(1.0 / self.shape)
    }

    /// `scale * Γ(1 + 1/shape)`.
    pub fn mean(&self) -> f64 {
        self.scale * gamma(1.0 + 1.0 / self.shape)
    }

    /// Inverse-transform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u)
    }
}
