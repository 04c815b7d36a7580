use serde::{Deserialize, Serialize};

use super::metrics::{appraisal_failure_ratio, defects_per_kloc, elimination_rate, introduction_rate, yield_percent};
use super::record::PspProgramRecord;
use super::{PspError, Result};

/// A metric value or an explicit not-applicable marker carrying the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Value(f64),
    NotApplicable { not_applicable: String },
}

impl MetricValue {
    pub fn na(reason: impl Into<String>) -> Self {
        MetricValue::NotApplicable { not_applicable: reason.into() }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            MetricValue::Value(v) => Some(*v),
            MetricValue::NotApplicable { .. } => None,
        }
    }
}

impl From<Result<f64>> for MetricValue {
    fn from(r: Result<f64>) -> Self {
        match r {
            Ok(v) => MetricValue::Value(v),
            Err(e) => MetricValue::na(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub values: Vec<MetricValue>,
    /// Least-squares slope against program number over the defined values.
    pub slope: MetricValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PspTrendReport {
    pub program_numbers: Vec<u32>,
    pub yield_percent: Series,
    pub defects_per_kloc: Series,
    pub elimination_rate: Series,
    pub introduction_rate: Series,
    pub appraisal_failure_ratio: Series,
}

impl PspTrendReport {
    /// `(file stem, series)` pairs, one per plotted metric.
    pub fn named_series(&self) -> [(&'static str, &Series); 5] {
        [
            ("yield_percent", &self.yield_percent),
            ("defects_per_kloc", &self.defects_per_kloc),
            ("elimination_rate", &self.elimination_rate),
            ("introduction_rate", &self.introduction_rate),
            ("appraisal_failure_ratio", &self.appraisal_failure_ratio),
        ]
    }
}

/// Ordinary least-squares slope of `y` on `x`; `None` with fewer than two
/// points or no spread in `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub fn trend_report(records: &[PspProgramRecord]) -> Result<PspTrendReport> {
    if records.is_empty() {
        return Err(PspError::Empty);
    }
    for pair in records.windows(2) {
        if pair[1].program_number <= pair[0].program_number {
            return Err(PspError::NotIncreasing { prev: pair[0].program_number, next: pair[1].program_number });
        }
    }
    for r in records {
        r.validate()?;
    }
    let xs: Vec<u32> = records.iter().map(|r| r.program_number).collect();
    let series = |metric: fn(&PspProgramRecord) -> Result<f64>| {
        let values: Vec<MetricValue> = records.iter().map(|r| metric(r).into()).collect();
        let points: Vec<(f64, f64)> = xs
            .iter()
            .zip(&values)
            .filter_map(|(x, v)| v.value().map(|v| (*x as f64, v)))
            .collect();
        let slope = match least_squares_slope(&points) {
            Some(s) => MetricValue::Value(s),
            None => MetricValue::na(format!("{} defined point(s); a trend needs at least 2", points.len())),
        };
        Series { values, slope }
    };
    Ok(PspTrendReport {
        yield_percent: series(yield_percent),
        defects_per_kloc: series(defects_per_kloc),
        elimination_rate: series(elimination_rate),
        introduction_rate: series(introduction_rate),
        appraisal_failure_ratio: series(appraisal_failure_ratio),
        program_numbers: xs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psp::record::{DefectEntry, Phase, PhaseTimes};

    fn rec(n: u32) -> PspProgramRecord {
        PspProgramRecord {
            program_number: n,
            loc_new_changed: 200,
            phase_minutes: PhaseTimes {
                design: 30.0,
                design_review: 10.0,
                code: 90.0,
                code_review: 20.0,
                compile: 10.0,
                test: 30.0,
                ..Default::default()
            },
            defects: vec![
                DefectEntry { injected: Phase::Code, removed: Phase::CodeReview, fix_minutes: 3.0, defect_type: "20".into() },
                DefectEntry { injected: Phase::Code, removed: Phase::Test, fix_minutes: 9.0, defect_type: "80".into() },
            ],
        }
    }

    #[test]
    fn single_record() {
        let r = trend_report(&[rec(1)]).unwrap();
        assert_eq!(r.yield_percent.values, vec![MetricValue::Value(50.0)]);
        assert!(r.yield_percent.slope.value().is_none());
    }

    #[test]
    fn constant_records_have_flat_trends() {
        let recs: Vec<_> = (1..=6).map(rec).collect();
        let r = trend_report(&recs).unwrap();
        for (_, s) in r.named_series() {
            assert_eq!(s.values.len(), 6);
            assert_eq!(s.slope, MetricValue::Value(0.0));
        }
    }

    #[test]
    fn order_enforced() {
        assert_eq!(trend_report(&[rec(2), rec(1)]), Err(PspError::NotIncreasing { prev: 2, next: 1 }));
        assert_eq!(trend_report(&[rec(2), rec(2)]), Err(PspError::NotIncreasing { prev: 2, next: 2 }));
        assert_eq!(trend_report(&[]), Err(PspError::Empty));
    }

    #[test]
    fn not_applicable_is_explicit() {
        let mut r = rec(1);
        r.defects.clear();
        let report = trend_report(&[r]).unwrap();
        let json = serde_json::to_value(&report.yield_percent.values[0]).unwrap();
        assert!(json["not_applicable"].as_str().unwrap().contains("yield"));
    }

    #[test]
    fn slope_of_line() {
        let pts = [(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)];
        assert_eq!(least_squares_slope(&pts), Some(2.0));
        assert_eq!(least_squares_slope(&pts[..1]), None);
    }
}
