//! Activity log format: UTF-8 lines, tab-separated.
//!
//! ```text
//! # ei-activity-log v1	tester=3	case=12	view=student	start_ms=5210
//! 5710	3	12	0	/student/	read	ok
//! 6210	3	12	1	/student/profile	update	fault:http-500
//! # end_ms=8210
//! ```
//!
//! Record fields: timestamp (ms on the evaluation clock), tester id, case id,
//! step index, node path, action, outcome. A log cut short by an outage ends
//! with `# aborted <reason>`.

use std::fmt;
use std::str::FromStr;

use ei_core::View;

use crate::Action;

pub const LOG_MAGIC: &str = "# ei-activity-log v1";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok,
    Fault(String),
    /// The page does not exist on the target.
    NavError(u16),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Ok => f.write_str("ok"),
            Outcome::Fault(code) => write!(f, "fault:{code}"),
            Outcome::NavError(status) => write!(f, "nav_error:{status}"),
        }
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "ok" {
            return Ok(Outcome::Ok);
        }
        if let Some(code) = s.strip_prefix("fault:") {
            if !code.is_empty() && !code.contains(char::is_whitespace) {
                return Ok(Outcome::Fault(code.to_string()));
            }
        }
        if let Some(status) = s.strip_prefix("nav_error:") {
            return status.parse().map(Outcome::NavError).map_err(|_| format!("bad nav_error status `{status}`"));
        }
        Err(format!("unknown outcome `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityRecord {
    pub timestamp_ms: u64,
    pub tester_id: u64,
    pub test_case_id: u64,
    pub step_index: usize,
    pub node: String,
    pub action: Action,
    pub outcome: Outcome,
}

impl fmt::Display for ActivityRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.timestamp_ms, self.tester_id, self.test_case_id, self.step_index, self.node, self.action, self.outcome
        )
    }
}

pub fn parse_record(line: &str) -> Result<ActivityRecord, String> {
    let f: Vec<&str> = line.split('\t').collect();
    if f.len() != 7 {
        return Err(format!("expected 7 fields, found {}", f.len()));
    }
    let num = |i: usize, name: &str| f[i].parse::<u64>().map_err(|_| format!("bad {name} `{}`", f[i]));
    Ok(ActivityRecord {
        timestamp_ms: num(0, "timestamp")?,
        tester_id: num(1, "tester id")?,
        test_case_id: num(2, "case id")?,
        step_index: num(3, "step index")? as usize,
        node: f[4].to_string(),
        action: f[5].parse()?,
        outcome: f[6].parse()?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogHeader {
    pub tester_id: u64,
    pub test_case_id: u64,
    pub view: View,
    pub start_ms: u64,
}

impl fmt::Display for LogHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{LOG_MAGIC}\ttester={}\tcase={}\tview={}\tstart_ms={}",
            self.tester_id, self.test_case_id, self.view, self.start_ms
        )
    }
}

impl LogHeader {
    pub fn parse(line: &str) -> Result<Self, String> {
        let rest = line.strip_prefix(LOG_MAGIC).ok_or("missing log header")?;
        let mut kv = std::collections::BTreeMap::new();
        for part in rest.split('\t').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("bad header field `{part}`"))?;
            kv.insert(k, v);
        }
        let get = |k: &str| kv.get(k).copied().ok_or_else(|| format!("header lacks {k}"));
        let num = |k: &str| get(k)?.parse::<u64>().map_err(|_| format!("bad header {k}"));
        Ok(LogHeader {
            tester_id: num("tester")?,
            test_case_id: num("case")?,
            view: get("view")?.parse()?,
            start_ms: num("start_ms")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let r = ActivityRecord {
            timestamp_ms: 6210,
            tester_id: 3,
            test_case_id: 12,
            step_index: 1,
            node: "/student/profile".into(),
            action: Action::Update,
            outcome: Outcome::Fault("http-500".into()),
        };
        let line = r.to_string();
        assert_eq!(line, "6210\t3\t12\t1\t/student/profile\tupdate\tfault:http-500");
        assert_eq!(parse_record(&line).unwrap(), r);
    }

    #[test]
    fn header_round_trip() {
        let h = LogHeader { tester_id: 3, test_case_id: 12, view: View::Student, start_ms: 5210 };
        assert_eq!(LogHeader::parse(&h.to_string()).unwrap(), h);
        assert!(LogHeader::parse("# something else").is_err());
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(parse_record("1\t2\t3").is_err());
        assert!(parse_record("x\t2\t3\t0\t/\tread\tok").is_err());
        assert!(parse_record("1\t2\t3\t0\t/\tread\tfault:").is_err());
        assert!(parse_record("1\t2\t3\t0\t/\tfly\tok").is_err());
        assert_eq!(parse_record("1\t2\t3\t0\t/\tread\tnav_error:404").unwrap().outcome, Outcome::NavError(404));
    }
}
