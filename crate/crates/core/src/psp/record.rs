use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PspError, Result};

/// Standard PSP phases in process order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Plan,
    Design,
    DesignReview,
    Code,
    CodeReview,
    Compile,
    Test,
    Postmortem,
}

impl Phase {
    pub const ALL: [Phase; 8] = [
        Phase::Plan,
        Phase::Design,
        Phase::DesignReview,
        Phase::Code,
        Phase::CodeReview,
        Phase::Compile,
        Phase::Test,
        Phase::Postmortem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Plan => "plan",
            Phase::Design => "design",
            Phase::DesignReview => "design_review",
            Phase::Code => "code",
            Phase::CodeReview => "code_review",
            Phase::Compile => "compile",
            Phase::Test => "test",
            Phase::Postmortem => "postmortem",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        Phase::ALL
            .into_iter()
            .find(|p| p.as_str() == norm)
            .ok_or_else(|| format!("unknown phase `{s}`"))
    }
}

/// Minutes spent per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseTimes {
    pub plan: f64,
    pub design: f64,
    pub design_review: f64,
    pub code: f64,
    pub code_review: f64,
    pub compile: f64,
    pub test: f64,
    pub postmortem: f64,
}

impl PhaseTimes {
    pub fn get(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Plan => self.plan,
            Phase::Design => self.design,
            Phase::DesignReview => self.design_review,
            Phase::Code => self.code,
            Phase::CodeReview => self.code_review,
            Phase::Compile => self.compile,
            Phase::Test => self.test,
            Phase::Postmortem => self.postmortem,
        }
    }

    pub fn set(&mut self, phase: Phase, minutes: f64) {
        let slot = match phase {
            Phase::Plan => &mut self.plan,
            Phase::Design => &mut self.design,
            Phase::DesignReview => &mut self.design_review,
            Phase::Code => &mut self.code,
            Phase::CodeReview => &mut self.code_review,
            Phase::Compile => &mut self.compile,
            Phase::Test => &mut self.test,
            Phase::Postmortem => &mut self.postmortem,
        };
        *slot = minutes;
    }

    pub fn minutes_in(&self, phases: &[Phase]) -> f64 {
        phases.iter().map(|p| self.get(*p)).sum()
    }

    pub fn scaled(&self, factor: f64) -> PhaseTimes {
        let mut out = *self;
        for p in Phase::ALL {
            out.set(p, self.get(p) * factor);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectEntry {
    pub injected: Phase,
    pub removed: Phase,
    #[serde(default)]
    pub fix_minutes: f64,
    #[serde(default, rename = "type")]
    pub defect_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PspProgramRecord {
    pub program_number: u32,
    pub loc_new_changed: u32,
    pub phase_minutes: PhaseTimes,
    #[serde(default)]
    pub defects: Vec<DefectEntry>,
}

impl PspProgramRecord {
    pub fn validate(&self) -> Result<()> {
        let err = |message: String| PspError::InvalidRecord { program: self.program_number, message };
        for p in Phase::ALL {
            let m = self.phase_minutes.get(p);
            if !(m.is_finite() && m >= 0.0) {
                return Err(err(format!("{p} time {m} must be finite and >= 0")));
            }
        }
        for (i, d) in self.defects.iter().enumerate() {
            if d.removed < d.injected {
                return Err(err(format!(
                    "defect {} removed in {} before being injected in {}",
                    i + 1,
                    d.removed,
                    d.injected
                )));
            }
            if !(d.fix_minutes.is_finite() && d.fix_minutes >= 0.0) {
                return Err(err(format!("defect {} fix time {} must be >= 0", i + 1, d.fix_minutes)));
            }
        }
        Ok(())
    }

    pub fn injected_in(&self, phases: &[Phase]) -> usize {
        self.defects.iter().filter(|d| phases.contains(&d.injected)).count()
    }

    pub fn removed_in(&self, phases: &[Phase]) -> usize {
        self.defects.iter().filter(|d| phases.contains(&d.removed)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_order_and_parse() {
        assert!(Phase::Design < Phase::CodeReview);
        assert_eq!("Code Review".parse::<Phase>().unwrap(), Phase::CodeReview);
        assert_eq!("design-review".parse::<Phase>().unwrap(), Phase::DesignReview);
        assert!("unit test".parse::<Phase>().is_err());
    }

    #[test]
    fn removal_before_injection_rejected() {
        let rec = PspProgramRecord {
            program_number: 1,
            loc_new_changed: 100,
            phase_minutes: PhaseTimes::default(),
            defects: vec![DefectEntry {
                injected: Phase::Code,
                removed: Phase::DesignReview,
                fix_minutes: 1.0,
                defect_type: "20".into(),
            }],
        };
        assert!(matches!(rec.validate(), Err(PspError::InvalidRecord { program: 1, .. })));
    }

    #[test]
    fn negative_time_rejected() {
        let rec = PspProgramRecord {
            program_number: 2,
            loc_new_changed: 100,
            phase_minutes: PhaseTimes { test: -1.0, ..PhaseTimes::default() },
            defects: vec![],
        };
        assert!(rec.validate().is_err());
    }
}
