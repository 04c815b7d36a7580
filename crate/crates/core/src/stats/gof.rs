//! Goodness-of-fit tests of a histogram (chi-square) or raw sample
//! (Kolmogorov-Smirnov) against a Weibull model.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::error::{Result, StatsError};
use super::histogram::Histogram;
use super::weibull::WeibullModel;

/// Minimum expected count per merged chi-square cell.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum GofTest {
    /// Pearson chi-square; `estimated_params` are subtracted from the degrees
    /// of freedom when the model was fitted to the same data.
    ChiSquare { estimated_params: usize },
    Ks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub test: GofTest,
    pub statistic: f64,
    /// Critical value at the requested significance.
    pub threshold: f64,
    pub dof: Option<usize>,
    pub significance: f64,
    pub p_value: f64,
    pub passed: bool,
    /// Chi-square cells after merging, or the sample size for KS.
    pub cells: usize,
}

pub fn goodness_of_fit(
    hist: &Histogram,
    samples: &[f64],
    model: &WeibullModel,
    test: GofTest,
    significance: f64,
) -> Result<GofResult> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(StatsError::InvalidArgument(format!("significance {significance} not in (0, 1)")));
    }
    match test {
        GofTest::ChiSquare { estimated_params } => chi_square(hist, model, estimated_params, significance),
        GofTest::Ks => kolmogorov_smirnov(samples, model, significance),
    }
}

/// Observed and expected counts per histogram bin. The first cell absorbs
/// the model mass below the lowest edge and the last cell the mass above
/// the highest edge, so expected counts sum to the sample total.
pub fn expected_cells(hist: &Histogram, model: &WeibullModel) -> Vec<(f64, f64)> {
    let n = hist.total as f64;
    let k = hist.bins.len();
    (0..k)
        .map(|i| {
            let lower = if i == 0 { 0.0 } else { model.cdf(hist.bins[i].lower_edge) };
            let upper = if i + 1 == k { 1.0 } else { model.cdf(hist.upper_edge(i)) };
            (hist.bins[i].count as f64, n * (upper - lower).max(0.0))
        })
        .collect()
}

/// Merge adjacent cells left to right until each expected count reaches
/// [`MIN_EXPECTED`]; a short remainder joins the last full cell.
pub fn merge_cells(cells: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for &(o, e) in cells {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= MIN_EXPECTED {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0.0 {
        match merged.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => merged.push(acc),
        }
    }
    merged
}

fn chi_square(hist: &Histogram, model: &WeibullModel, estimated_params: usize, significance: f64) -> Result<GofResult> {
    let merged = merge_cells(&expected_cells(hist, model));
    if merged.len() < 3 {
        return Err(StatsError::InsufficientData(format!(
            "chi-square needs at least 3 cells with expected count >= {MIN_EXPECTED}, got {}",
            merged.len()
        )));
    }
    let dof = merged.len() as i64 - 1 - estimated_params as i64;
    if dof < 1 {
        return Err(StatsError::InsufficientData(format!(
            "{} cells leave no degrees of freedom after {estimated_params} estimated parameters",
            merged.len()
        )));
    }
    let statistic: f64 = merged.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    let threshold = dist.inverse_cdf(1.0 - significance);
    Ok(GofResult {
        test: GofTest::ChiSquare { estimated_params },
        statistic,
        threshold,
        dof: Some(dof as usize),
        significance,
        p_value: dist.sf(statistic),
        passed: statistic <= threshold,
        cells: merged.len(),
    })
}

fn kolmogorov_smirnov(samples: &[f64], model: &WeibullModel, significance: f64) -> Result<GofResult> {
    let n = samples.len();
    if n < 5 {
        return Err(StatsError::InsufficientData(format!("KS test needs n >= 5, got {n}")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = model.cdf(x);
            ((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    // Stephens' finite-sample scaling of the asymptotic Kolmogorov law
    let scale = nf.sqrt() + 0.12 + 0.11 / nf.sqrt();
    let threshold = (-0.5 * (significance / 2.0).ln()).sqrt() / scale;
    Ok(GofResult {
        test: GofTest::Ks,
        statistic,
        threshold,
        dof: None,
        significance,
        p_value: kolmogorov_sf(scale * statistic),
        passed: statistic <= threshold,
        cells: n,
    })
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
