use std::io::Write;

use serde::{Deserialize, Serialize};

use super::error::{Result, StatsError};
use super::samples::DefectSampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lower_edge: f64,
    pub count: u64,
}

/// Fixed-width frequency table. Bins are contiguous from the lowest to the
/// highest occupied bin; interior empty bins are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub origin: f64,
    pub bins: Vec<Bin>,
    pub total: u64,
}

impl Histogram {
    pub fn upper_edge(&self, i: usize) -> f64 {
        self.bins[i].lower_edge + self.bin_width
    }

    /// `lower_edge,count` rows with a header line.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["lower_edge", "count"])?;
        for b in &self.bins {
            wtr.write_record([b.lower_edge.to_string(), b.count.to_string()])?;
        }
        wtr.flush()
    }
}

pub fn build_histogram(samples: &DefectSampleSet, bin_width: f64, origin: f64) -> Result<Histogram> {
    histogram_of(samples.values(), bin_width, origin)
}

pub fn histogram_of(values: &[f64], bin_width: f64, origin: f64) -> Result<Histogram> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(StatsError::InvalidArgument(format!("bin width {bin_width} must be positive")));
    }
    if !origin.is_finite() {
        return Err(StatsError::InvalidArgument(format!("origin {origin} must be finite")));
    }
    if values.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "histogram needs at least 2 retained values, got {}",
            values.len()
        )));
    }
    let index = |x: f64| ((x - origin) / bin_width).floor() as i64;
    let (lo, hi) = values
        .iter()
        .map(|&x| index(x))
        .fold((i64::MAX, i64::MIN), |(lo, hi), i| (lo.min(i), hi.max(i)));
    let mut counts = vec![0u64; (hi - lo + 1) as usize];
    for &x in values {
        counts[(index(x) - lo) as usize] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| Bin {
            lower_edge: origin + (lo + k as i64) as f64 * bin_width,
            count,
        })
        .collect();
    Ok(Histogram {
        bin_width,
        origin,
        bins,
        total: values.len() as u64,
    })
}
