//! Maximum-likelihood Weibull fitting.
//!
//! The shape estimate is the root of the profile score
//!
//! ```text
//! g(a) = Σ x^a ln x / Σ x^a - 1/a - (Σ ln x)/n
//! ```
//!
//! and the scale follows in closed form, `b = (Σ x^a / n)^(1/a)`. `g` is
//! strictly increasing (its derivative is a weighted variance of `ln x` plus
//! `1/a²`), so a bracketed Newton iteration with a bisection fallback always
//! terminates when a root exists in the bracket.

use log::warn;
use serde::{Deserialize, Serialize};

use super::error::{Result, StatsError};
use super::gof::{goodness_of_fit, GofResult, GofTest};
use super::histogram::histogram_of;
use super::samples::DefectSampleSet;
use super::weibull::WeibullModel;

/// Above this value of `a * max|ln x|` the power sums are evaluated with a
/// max-shift (log-sum-exp) to avoid overflow.
const LOG_SPACE_THRESHOLD: f64 = 600.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub initial_shape: f64,
    /// Convergence threshold on |g(a)|.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub bracket: (f64, f64),
    pub bisection_iterations: usize,
    /// Goodness-of-fit run against the fitted model; `None` skips it.
    pub gof: Option<GofConfig>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            initial_shape: 1.0,
            tolerance: 1e-9,
            max_iterations: 100,
            bracket: (1e-3, 1e3),
            bisection_iterations: 200,
            gof: Some(GofConfig::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GofConfig {
    pub test: GofTest,
    pub significance: f64,
    pub bin_width: f64,
    pub origin: f64,
}

impl Default for GofConfig {
    fn default() -> Self {
        GofConfig {
            test: GofTest::ChiSquare { estimated_params: 2 },
            significance: 0.05,
            bin_width: 1.0,
            origin: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootMethod {
    Newton,
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: WeibullModel,
    /// Number of strictly positive values used by the estimator.
    pub sample_count: usize,
    pub zeros_excluded: usize,
    pub iterations: usize,
    /// |g(shape)| at the returned estimate.
    pub residual: f64,
    pub method: RootMethod,
    pub gof: Option<GofResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gof_note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeRoot {
    pub shape: f64,
    pub iterations: usize,
    pub residual: f64,
    pub method: RootMethod,
}

/// Precomputed logarithms of a strictly positive sample.
#[derive(Debug, Clone)]
pub struct ScoreFunction {
    logs: Vec<f64>,
    mean_log: f64,
    max_abs_log: f64,
}

impl ScoreFunction {
    /// Callers guarantee every value is finite and > 0.
    pub fn new(values: &[f64]) -> Self {
        let logs: Vec<f64> = values.iter().map(|x| x.ln()).collect();
        let mean_log = logs.iter().sum::<f64>() / logs.len() as f64;
        let max_abs_log = logs.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        ScoreFunction { logs, mean_log, max_abs_log }
    }

    fn n(&self) -> f64 {
        self.logs.len() as f64
    }

    /// Power-sum weights `x^a`, possibly scaled by `exp(-shift)`.
    fn weights(&self, a: f64) -> (Vec<f64>, f64) {
        if a * self.max_abs_log <= LOG_SPACE_THRESHOLD {
            (self.logs.iter().map(|l| (a * l).exp()).collect(), 0.0)
        } else {
            let shift = self.logs.iter().fold(f64::NEG_INFINITY, |m, l| m.max(a * l));
            (self.logs.iter().map(|l| (a * l - shift).exp()).collect(), shift)
        }
    }

    /// Weighted first and second moments of `ln x` under weights `x^a`.
    fn moments(&self, a: f64) -> (f64, f64) {
        let (w, _) = self.weights(a);
        let s0: f64 = w.iter().sum();
        let s1: f64 = w.iter().zip(&self.logs).map(|(w, l)| w * l).sum();
        let s2: f64 = w.iter().zip(&self.logs).map(|(w, l)| w * l * l).sum();
        (s1 / s0, s2 / s0)
    }

    pub fn value(&self, a: f64) -> f64 {
        let (m1, _) = self.moments(a);
        m1 - 1.0 / a - self.mean_log
    }

    pub fn value_and_derivative(&self, a: f64) -> (f64, f64) {
        let (m1, m2) = self.moments(a);
        (m1 - 1.0 / a - self.mean_log, (m2 - m1 * m1).max(0.0) + 1.0 / (a * a))
    }

    /// Closed-form scale for a given shape: `(Σ x^a / n)^(1/a)`.
    pub fn scale_for(&self, a: f64) -> f64 {
        let (w, shift) = self.weights(a);
        let s0: f64 = w.iter().sum();
        if shift == 0.0 {
            (s0 / self.n()).powf(1.0 / a)
        } else {
            ((shift + s0.ln() - self.n().ln()) / a).exp()
        }
    }

    pub fn solve(&self, cfg: &SolverConfig) -> Result<ShapeRoot> {
        let (mut lo, mut hi) = cfg.bracket;
        let g_hi = self.value(hi);
        if g_hi < 0.0 {
            return Err(StatsError::NoConvergence { iterations: 0, residual: g_hi.abs() });
        }
        let mut a = cfg.initial_shape;
        let mut iterations = 0;
        let mut last_residual = f64::INFINITY;
        if a > lo && a < hi {
            while iterations < cfg.max_iterations {
                iterations += 1;
                let (g, dg) = self.value_and_derivative(a);
                last_residual = g.abs();
                if !g.is_finite() {
                    break;
                }
                if g.abs() <= cfg.tolerance {
                    return Ok(ShapeRoot { shape: a, iterations, residual: g.abs(), method: RootMethod::Newton });
                }
                if g < 0.0 {
                    lo = a;
                } else {
                    hi = a;
                }
                let next = a - g / dg;
                if !(next.is_finite() && next > lo && next < hi) {
                    break;
                }
                a = next;
            }
        }
        for _ in 0..cfg.bisection_iterations {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            let g = self.value(mid);
            last_residual = g.abs();
            if g.abs() <= cfg.tolerance {
                return Ok(ShapeRoot { shape: mid, iterations, residual: g.abs(), method: RootMethod::Bisection });
            }
            if g < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * mid {
                break;
            }
        }
        Err(StatsError::NoConvergence { iterations, residual: last_residual })
    }
}

/// Fit a Weibull law to the retained values of `samples`. Zero densities are
/// outside the Weibull support and are excluded (and counted).
pub fn fit_weibull(samples: &DefectSampleSet, cfg: &SolverConfig) -> Result<FitReport> {
    let positives: Vec<f64> = samples.values().iter().copied().filter(|v| *v > 0.0).collect();
    let zeros_excluded = samples.len() - positives.len();
    if zeros_excluded > 0 {
        warn!(
            "excluding {zeros_excluded} zero-valued sample(s) of {} from the Weibull fit{}",
            samples.len(),
            if samples.source_label.is_empty() { String::new() } else { format!(" ({})", samples.source_label) }
        );
    }
    let root = fit_positive(&positives, cfg)?;
    let score = ScoreFunction::new(&positives);
    let model = WeibullModel::new(root.shape, score.scale_for(root.shape))?;

    let (gof, gof_note) = match &cfg.gof {
        None => (None, None),
        Some(g) => {
            let outcome = histogram_of(&positives, g.bin_width, g.origin)
                .and_then(|h| goodness_of_fit(&h, &positives, &model, g.test, g.significance));
            match outcome {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
    };

    Ok(FitReport {
        model,
        sample_count: positives.len(),
        zeros_excluded,
        iterations: root.iterations,
        residual: root.residual,
        method: root.method,
        gof,
        gof_note,
    })
}

/// Shape root for a slice of strictly positive values.
pub fn fit_positive(values: &[f64], cfg: &SolverConfig) -> Result<ShapeRoot> {
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(StatsError::InvalidArgument(format!("sample value {bad} is not strictly positive")));
    }
    if values.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "need at least 2 positive samples, got {}",
            values.len()
        )));
    }
    if values.iter().all(|v| *v == values[0]) {
        return Err(StatsError::NonIdentifiable { n: values.len(), value: values[0] });
    }
    ScoreFunction::new(values).solve(cfg)
}

/// Log-likelihood of `values` under `model`; `-inf` if any value is <= 0.
pub fn log_likelihood(model: &WeibullModel, values: &[f64]) -> f64 {
    let (a, b) = (model.shape(), model.scale());
    values
        .iter()
        .map(|&x| {
            if x <= 0.0 {
                f64::NEG_INFINITY
            } else {
                a.ln() - a * b.ln() + (a - 1.0) * x.ln() - (x / b).powf(a)
            }
        })
        .sum()
}
