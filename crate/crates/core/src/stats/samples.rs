use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::error::{Result, StatsError};

/// Rule used to flag anomalous measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "k", rename_all = "lowercase")]
pub enum AnomalyPolicy {
    /// Outside `[Q1 - k*IQR, Q3 + k*IQR]` (quartiles by linear interpolation).
    Tukey(f64),
    /// More than `k` sample standard deviations from the mean.
    Zscore(f64),
    None,
}

impl Default for AnomalyPolicy {
    fn default() -> Self {
        AnomalyPolicy::Tukey(3.0)
    }
}

impl fmt::Display for AnomalyPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnomalyPolicy::Tukey(k) => write!(f, "tukey({k})"),
            AnomalyPolicy::Zscore(k) => write!(f, "zscore({k})"),
            AnomalyPolicy::None => f.write_str("none"),
        }
    }
}

impl std::str::FromStr for AnomalyPolicy {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "none" {
            return Ok(AnomalyPolicy::None);
        }
        let bad = || StatsError::InvalidArgument(format!("anomaly policy `{s}` (expected tukey(k), zscore(k) or none)"));
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let k: f64 = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        if !(k.is_finite() && k > 0.0) {
            return Err(bad());
        }
        match name.trim() {
            "tukey" => Ok(AnomalyPolicy::Tukey(k)),
            "zscore" => Ok(AnomalyPolicy::Zscore(k)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discarded {
    pub value: f64,
    pub reason: String,
}

/// Per-run defect-density measurements with discard bookkeeping.
///
/// Retained values are always finite and non-negative; retained plus
/// discarded together reproduce the raw input as a multiset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DefectSampleSet {
    values: Vec<f64>,
    discarded: Vec<Discarded>,
    pub source_label: String,
}

impl DefectSampleSet {
    /// Keeps finite non-negative values; everything else is discarded with a reason.
    pub fn from_raw(raw: &[f64], source_label: impl Into<String>) -> Self {
        let mut set = DefectSampleSet {
            values: Vec::with_capacity(raw.len()),
            discarded: Vec::new(),
            source_label: source_label.into(),
        };
        for &v in raw {
            if !v.is_finite() {
                set.discarded.push(Discarded { value: v, reason: "non-finite value".into() });
            } else if v < 0.0 {
                set.discarded.push(Discarded { value: v, reason: "negative defect density".into() });
            } else {
                set.values.push(v);
            }
        }
        set
    }

    /// Move a value straight into the discard list, e.g. a round that aborted.
    pub fn push_flagged(&mut self, value: f64, reason: impl Into<String>) {
        self.discarded.push(Discarded { value, reason: reason.into() });
    }

    pub fn push(&mut self, value: f64) {
        if value.is_finite() && value >= 0.0 {
            self.values.push(value);
        } else {
            self.push_flagged(value, "invalid defect density");
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn discarded(&self) -> &[Discarded] {
        &self.discarded
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Retained followed by discarded values.
    pub fn raw_values(&self) -> Vec<f64> {
        self.values.iter().copied().chain(self.discarded.iter().map(|d| d.value)).collect()
    }

    /// Apply `policy` to the retained values, repeating until a pass discards
    /// nothing, so the result is a fixed point of the policy.
    pub fn refine(mut self, policy: AnomalyPolicy) -> Result<Self> {
        let mut pass = 1;
        loop {
            let flagged = flag_pass(&self.values, policy);
            if flagged.is_empty() {
                break;
            }
            let mut keep = Vec::with_capacity(self.values.len());
            let mut flagged = flagged.into_iter().peekable();
            for (i, v) in self.values.iter().copied().enumerate() {
                match flagged.peek() {
                    Some((j, _)) if *j == i => {
                        let (_, why) = flagged.next().unwrap();
                        self.discarded.push(Discarded { value: v, reason: format!("{why} [pass {pass}]") });
                    }
                    _ => keep.push(v),
                }
            }
            self.values = keep;
            pass += 1;
            if self.values.is_empty() {
                break;
            }
        }
        if self.values.is_empty() {
            return Err(StatsError::AllDiscarded { discarded: self.discarded.len() });
        }
        Ok(self)
    }

    /// One value per line; blank lines and `#` comments skipped.
    pub fn read_lines<R: BufRead>(reader: R) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| StatsError::Parse { line: i + 1, message: e.to_string() })?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let v = t.parse::<f64>().map_err(|e| StatsError::Parse {
                line: i + 1,
                message: format!("`{t}`: {e}"),
            })?;
            out.push(v);
        }
        Ok(out)
    }

    /// A named column (or a zero-based index when `column` parses as one) of a
    /// headed CSV document.
    pub fn read_csv_column<R: std::io::Read>(reader: R, column: &str) -> Result<Vec<f64>> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| StatsError::Parse { line: 1, message: e.to_string() })?
            .clone();
        let idx = headers
            .iter()
            .position(|h| h.trim() == column)
            .or_else(|| column.parse::<usize>().ok().filter(|i| *i < headers.len()))
            .ok_or_else(|| StatsError::Parse { line: 1, message: format!("no column `{column}`") })?;
        let mut out = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| StatsError::Parse { line, message: e.to_string() })?;
            let cell = rec.get(idx).unwrap_or("").trim();
            if cell.is_empty() {
                continue;
            }
            out.push(cell.parse::<f64>().map_err(|e| StatsError::Parse {
                line,
                message: format!("`{cell}`: {e}"),
            })?);
        }
        Ok(out)
    }

    /// Write retained values one per line, shortest round-trip formatting.
    pub fn write_lines<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }
}

/// Build a sample set from raw measurements and drop anomalies under `policy`.
pub fn discard_anomalies(raw: &[f64], policy: AnomalyPolicy) -> Result<DefectSampleSet> {
    discard_anomalies_labeled(raw, policy, "")
}

pub fn discard_anomalies_labeled(raw: &[f64], policy: AnomalyPolicy, label: &str) -> Result<DefectSampleSet> {
    if raw.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let set = DefectSampleSet::from_raw(raw, label);
    if set.is_empty() {
        return Err(StatsError::AllDiscarded { discarded: set.discarded.len() });
    }
    set.refine(policy)
}

/// Indices (ascending) flagged in a single pass, with reasons.
fn flag_pass(values: &[f64], policy: AnomalyPolicy) -> Vec<(usize, String)> {
    match policy {
        AnomalyPolicy::None => Vec::new(),
        AnomalyPolicy::Tukey(k) => {
            if values.len() < 4 {
                return Vec::new();
            }
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let q1 = quantile_sorted(&sorted, 0.25);
            let q3 = quantile_sorted(&sorted, 0.75);
            let iqr = q3 - q1;
            let (lo, hi) = (q1 - k * iqr, q3 + k * iqr);
            values
                .iter()
                .enumerate()
                .filter_map(|(i, &v)| {
                    if v < lo {
                        Some((i, format!("below tukey fence {lo} (k={k})")))
                    } else if v > hi {
                        Some((i, format!("above tukey fence {hi} (k={k})")))
                    } else {
                        None
                    }
                })
                .collect()
        }
        AnomalyPolicy::Zscore(k) => {
            let n = values.len();
            if n < 3 {
                return Vec::new();
            }
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let sd = var.sqrt();
            if sd == 0.0 {
                return Vec::new();
            }
            values
                .iter()
                .enumerate()
                .filter_map(|(i, &v)| {
                    let z = (v - mean) / sd;
                    (z.abs() > k).then(|| (i, format!("z-score {z:.3} beyond ±{k}")))
                })
                .collect()
        }
    }
}

/// Linear-interpolation quantile of sorted data (Hyndman & Fan type 7).
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
