use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::activity::{parse_record, LogHeader, Outcome, LOG_MAGIC};
use crate::{Action, HarnessError, Result};

/// Mean time to failure in seconds, or the infinity marker when no fault
/// was observed. Serialized as a number or the string `"infinity"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mttf {
    Seconds(f64),
    Infinite,
}

impl Mttf {
    pub fn seconds(&self) -> Option<f64> {
        match self {
            Mttf::Seconds(s) => Some(*s),
            Mttf::Infinite => None,
        }
    }
}

impl Serialize for Mttf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mttf::Seconds(v) => s.serialize_f64(*v),
            Mttf::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for Mttf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Mttf::Seconds(v)),
            Raw::Text(t) if t == "infinity" => Ok(Mttf::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad mttf `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaultRecord {
    pub tester_id: u64,
    pub step_index: usize,
    pub timestamp_ms: u64,
    pub test_case_id: u64,
    pub node: String,
    pub action: Action,
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSignature {
    pub node: String,
    pub action: Action,
    pub code: String,
    pub count: u64,
}

/// A line the analyzer skipped.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MalformedNote {
    pub file: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorLog {
    pub defect_density: u64,
    pub mttf: Mttf,
    /// Sum over testers of end minus start, in ms.
    pub total_active_ms: u64,
    /// Earliest tester start to latest tester end, in ms.
    pub evaluation_duration_ms: u64,
    pub testers: usize,
    pub records: u64,
    pub ok: u64,
    pub nav_errors: u64,
    pub aborted_logs: usize,
    pub signatures: Vec<FaultSignature>,
    pub faults: Vec<FaultRecord>,
    pub malformed: Vec<MalformedNote>,
}

/// Read and analyze log files. The result does not depend on the order of
/// `paths`.
pub fn analyze_logs(paths: &[PathBuf]) -> Result<ErrorLog> {
    let mut texts = Vec::with_capacity(paths.len());
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?;
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string());
        texts.push((name, text));
    }
    Ok(analyze_log_texts(&texts))
}

/// Analyze `(file name, contents)` pairs.
pub fn analyze_log_texts(logs: &[(String, String)]) -> ErrorLog {
    let mut faults = Vec::new();
    let mut malformed = Vec::new();
    let (mut records, mut ok, mut nav_errors, mut aborted_logs) = (0u64, 0u64, 0u64, 0usize);
    let mut total_active_ms = 0u64;
    let mut span: Option<(u64, u64)> = None;

    for (file, text) in logs {
        let mut note = |line: usize, message: String| malformed.push(MalformedNote { file: file.clone(), line, message });
        let mut start: Option<u64> = None;
        let mut end: Option<u64> = None;
        let mut first_ts: Option<u64> = None;
        let mut last_ts: Option<u64> = None;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if line.starts_with(LOG_MAGIC) {
                match LogHeader::parse(line) {
                    Ok(h) => start = Some(h.start_ms),
                    Err(e) => note(lineno, e),
                }
                continue;
            }
            if let Some(v) = line.strip_prefix("# end_ms=") {
                match v.trim().parse() {
                    Ok(v) => end = Some(v),
                    Err(_) => note(lineno, format!("bad end marker `{line}`")),
                }
                continue;
            }
            if line.starts_with("# aborted") {
                aborted_logs += 1;
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let rec = match parse_record(line) {
                Ok(r) => r,
                Err(e) => {
                    note(lineno, e);
                    continue;
                }
            };
            records += 1;
            first_ts.get_or_insert(rec.timestamp_ms);
            last_ts = Some(rec.timestamp_ms);
            match rec.outcome {
                Outcome::Ok => ok += 1,
                Outcome::NavError(_) => nav_errors += 1,
                Outcome::Fault(code) => faults.push(FaultRecord {
                    tester_id: rec.tester_id,
                    step_index: rec.step_index,
                    timestamp_ms: rec.timestamp_ms,
                    test_case_id: rec.test_case_id,
                    node: rec.node,
                    action: rec.action,
                    code,
                }),
            }
        }
        let Some(s) = start.or(first_ts) else { continue };
        let e = end.or(last_ts).unwrap_or(s).max(s);
        total_active_ms += e - s;
        span = Some(match span {
            Some((a, b)) => (a.min(s), b.max(e)),
            None => (s, e),
        });
    }

    faults.sort();
    malformed.sort();
    let mut groups: BTreeMap<(String, Action, String), u64> = BTreeMap::new();
    for f in &faults {
        *groups.entry((f.node.clone(), f.action, f.code.clone())).or_default() += 1;
    }
    let signatures = groups.into_iter().map(|((node, action, code), count)| FaultSignature { node, action, code, count }).collect();
    let density = faults.len() as u64;
    let mttf = if density == 0 { Mttf::Infinite } else { Mttf::Seconds(total_active_ms as f64 / 1000.0 / density as f64) };
    ErrorLog {
        defect_density: density,
        mttf,
        total_active_ms,
        evaluation_duration_ms: span.map_or(0, |(a, b)| b - a),
        testers: logs.len(),
        records,
        ok,
        nav_errors,
        aborted_logs,
        signatures,
        faults,
        malformed,
    }
}
