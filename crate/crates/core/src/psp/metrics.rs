use super::record::{Phase, PspProgramRecord};
use super::{PspError, Result};

/// Phases up to and including code review (everything before compile).
const PRE_COMPILE: [Phase; 5] = [Phase::Plan, Phase::Design, Phase::DesignReview, Phase::Code, Phase::CodeReview];
const REMOVAL_PHASES: [Phase; 4] = [Phase::DesignReview, Phase::CodeReview, Phase::Compile, Phase::Test];
const INJECTION_PHASES: [Phase; 2] = [Phase::Design, Phase::Code];
const APPRAISAL_PHASES: [Phase; 2] = [Phase::DesignReview, Phase::CodeReview];
const FAILURE_PHASES: [Phase; 2] = [Phase::Compile, Phase::Test];

/// Process yield: percentage of the defects injected before compile that
/// were also removed before compile.
pub fn yield_percent(rec: &PspProgramRecord) -> Result<f64> {
    let injected = rec.injected_in(&PRE_COMPILE);
    if injected == 0 {
        return Err(PspError::NoDefects);
    }
    let removed = rec.removed_in(&PRE_COMPILE);
    Ok(100.0 * removed as f64 / injected as f64)
}

pub fn defects_per_kloc(rec: &PspProgramRecord) -> Result<f64> {
    if rec.loc_new_changed == 0 {
        return Err(PspError::ZeroLoc);
    }
    Ok(1000.0 * rec.defects.len() as f64 / rec.loc_new_changed as f64)
}

/// Defects removed per hour of review, compile and test.
pub fn elimination_rate(rec: &PspProgramRecord) -> Result<f64> {
    per_hour(rec.removed_in(&REMOVAL_PHASES), rec.phase_minutes.minutes_in(&REMOVAL_PHASES), "removal")
}

/// Defects injected per hour of design and code.
pub fn introduction_rate(rec: &PspProgramRecord) -> Result<f64> {
    per_hour(rec.injected_in(&INJECTION_PHASES), rec.phase_minutes.minutes_in(&INJECTION_PHASES), "injection")
}

/// Review minutes over compile plus test minutes.
pub fn appraisal_failure_ratio(rec: &PspProgramRecord) -> Result<f64> {
    let failure = rec.phase_minutes.minutes_in(&FAILURE_PHASES);
    if failure <= 0.0 {
        return Err(PspError::ZeroFailureTime);
    }
    Ok(rec.phase_minutes.minutes_in(&APPRAISAL_PHASES) / failure)
}

fn per_hour(count: usize, minutes: f64, phases: &'static str) -> Result<f64> {
    if count == 0 {
        return Ok(0.0);
    }
    if minutes <= 0.0 {
        return Err(PspError::ZeroTime(phases));
    }
    Ok(count as f64 * 60.0 / minutes)
}
