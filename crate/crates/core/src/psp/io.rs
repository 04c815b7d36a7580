//! Record input and series output.
//!
//! CSV input has one row per defect, joined to its program's columns:
//!
//! ```text
//! program,loc,plan,design,design_review,code,code_review,compile,test,postmortem,injected,removed,fix_minutes,type
//! ```
//!
//! A program without defects appears once with the four defect columns
//! empty. Every row of a program must repeat the same LOC and times.

use std::io::{Read, Write};

use super::record::{DefectEntry, Phase, PhaseTimes, PspProgramRecord};
use super::trend::{MetricValue, Series};
use super::{PspError, Result};

pub const CSV_HEADER: [&str; 14] = [
    "program",
    "loc",
    "plan",
    "design",
    "design_review",
    "code",
    "code_review",
    "compile",
    "test",
    "postmortem",
    "injected",
    "removed",
    "fix_minutes",
    "type",
];

pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<PspProgramRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| PspError::Parse { line: 1, column: String::new(), message: e.to_string() })?
        .clone();
    let mut cols = [0usize; 14];
    for (slot, name) in cols.iter_mut().zip(CSV_HEADER) {
        *slot = headers.iter().position(|h| h.eq_ignore_ascii_case(name)).ok_or_else(|| PspError::Parse {
            line: 1,
            column: name.into(),
            message: "missing column".into(),
        })?;
    }

    let mut records: Vec<PspProgramRecord> = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| PspError::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            column: String::new(),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let cell = |i: usize| row.get(cols[i]).unwrap_or("");
        let parse_err = |i: usize, message: String| PspError::Parse { line, column: CSV_HEADER[i].into(), message };
        let num = |i: usize| -> Result<f64> {
            cell(i).parse::<f64>().map_err(|e| parse_err(i, format!("`{}`: {e}", cell(i))))
        };

        let program: u32 = cell(0).parse().map_err(|e| parse_err(0, format!("`{}`: {e}", cell(0))))?;
        let loc: u32 = cell(1).parse().map_err(|e| parse_err(1, format!("`{}`: {e}", cell(1))))?;
        let mut times = PhaseTimes::default();
        for (k, phase) in Phase::ALL.into_iter().enumerate() {
            times.set(phase, num(2 + k)?);
        }
        let defect = if cell(10).is_empty() && cell(11).is_empty() {
            None
        } else {
            let phase = |i: usize| cell(i).parse::<Phase>().map_err(|e| parse_err(i, e));
            Some(DefectEntry {
                injected: phase(10)?,
                removed: phase(11)?,
                fix_minutes: if cell(12).is_empty() { 0.0 } else { num(12)? },
                defect_type: cell(13).to_string(),
            })
        };

        match records.last_mut() {
            Some(last) if last.program_number == program => {
                if last.loc_new_changed != loc || last.phase_minutes != times {
                    return Err(PspError::Parse {
                        line,
                        column: "program".into(),
                        message: format!("program {program} repeats with different LOC or phase times"),
                    });
                }
                last.defects.extend(defect);
            }
            _ => {
                if records.iter().any(|r| r.program_number == program) {
                    return Err(PspError::Parse {
                        line,
                        column: "program".into(),
                        message: format!("rows for program {program} are not contiguous"),
                    });
                }
                records.push(PspProgramRecord {
                    program_number: program,
                    loc_new_changed: loc,
                    phase_minutes: times,
                    defects: defect.into_iter().collect(),
                });
            }
        }
    }
    if records.is_empty() {
        return Err(PspError::Empty);
    }
    Ok(records)
}

/// A JSON array of records.
pub fn read_records_json<R: Read>(reader: R) -> Result<Vec<PspProgramRecord>> {
    let records: Vec<PspProgramRecord> = serde_json::from_reader(reader).map_err(|e| PspError::Parse {
        line: e.line() as u64,
        column: e.column().to_string(),
        message: e.to_string(),
    })?;
    if records.is_empty() {
        return Err(PspError::Empty);
    }
    Ok(records)
}

/// `program_number,value` rows; undefined values are written as `NA`.
pub fn write_series_csv<W: Write>(w: W, program_numbers: &[u32], series: &Series) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["program_number", "value"])?;
    for (n, v) in program_numbers.iter().zip(&series.values) {
        let cell = match v {
            MetricValue::Value(x) => x.to_string(),
            MetricValue::NotApplicable { .. } => "NA".to_string(),
        };
        wtr.write_record([n.to_string(), cell])?;
    }
    wtr.flush()
}
