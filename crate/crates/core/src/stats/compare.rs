use serde::{Deserialize, Serialize};

use super::weibull::WeibullModel;

/// Number of evenly spaced points on the comparison grid.
pub const GRID_POINTS: usize = 10_001;
/// Upper end of the grid is the larger of the two models' quantiles at this level.
pub const GRID_UPPER_QUANTILE: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    /// `a` has the lower expected defect density.
    AMoreReliable,
    BMoreReliable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: WeibullModel,
    pub b: WeibullModel,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `mean_a / mean_b`.
    pub mean_ratio: f64,
    pub sup_cdf_distance: f64,
    pub sup_at: f64,
    pub grid_upper: f64,
    pub grid_points: usize,
    pub verdict: Verdict,
}

/// Evenly spaced grid on `[0, upper]` covering both models' mass.
pub fn comparison_grid(a: &WeibullModel, b: &WeibullModel, points: usize) -> Vec<f64> {
    let upper = a.quantile(GRID_UPPER_QUANTILE).max(b.quantile(GRID_UPPER_QUANTILE));
    let step = upper / (points - 1) as f64;
    (0..points).map(|i| i as f64 * step).collect()
}

pub fn compare_models(a: &WeibullModel, b: &WeibullModel) -> ComparisonReport {
    let mean_a = a.mean();
    let mean_b = b.mean();
    let grid = comparison_grid(a, b, GRID_POINTS);
    let (sup_at, sup) = grid
        .iter()
        .map(|&x| (x, (a.cdf(x) - b.cdf(x)).abs()))
        .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let verdict = if (mean_a - mean_b).abs() <= 1e-12 * mean_a.max(mean_b) {
        Verdict::Equal
    } else if mean_a < mean_b {
        Verdict::AMoreReliable
    } else {
        Verdict::BMoreReliable
    };
    ComparisonReport {
        a: *a,
        b: *b,
        mean_a,
        mean_b,
        mean_ratio: mean_a / mean_b,
        sup_cdf_distance: sup,
        sup_at,
        grid_upper: *grid.last().unwrap(),
        grid_points: grid.len(),
        verdict,
    }
}

/// `(x, pdf_a(x), pdf_b(x))` rows over the comparison grid, for overlay plots.
pub fn overlay_curves(a: &WeibullModel, b: &WeibullModel, points: usize) -> Vec<(f64, f64, f64)> {
    comparison_grid(a, b, points.max(2))
        .into_iter()
        .map(|x| (x, a.pdf(x), b.pdf(x)))
        .collect()
}
