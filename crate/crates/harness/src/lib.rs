//! Navigational testing of a web target.
//!
//! The pipeline is crawl → generate cases → run testers → analyze logs. A
//! campaign repeats the last three steps and yields one defect density per
//! round. [`mock`] provides an in-process target with a declarative fault
//! table so every stage can be checked without a real application.

mod activity;
mod analyze;
mod campaign;
mod cases;
mod crawl;
mod error;
mod evaluate;
mod http;
pub mod mock;
mod profile;
mod site;

pub use activity::{parse_record, ActivityRecord, LogHeader, Outcome, LOG_MAGIC};
pub use analyze::{analyze_log_texts, analyze_logs, ErrorLog, FaultRecord, FaultSignature, MalformedNote, Mttf};
pub use campaign::{round_seed, run_campaign, CampaignConfig, CampaignResult, RoundSummary};
pub use cases::{generate_test_cases, CaseConfig, Step, TestCase};
pub use crawl::{crawl_site, CrawlAuth, CrawlLimits};
pub use error::{HarnessError, Result};
pub use evaluate::{plan_evaluation, run_evaluation, Evaluation, ExpectRules, HarnessConfig, PlannedStep, TesterPlan};
pub use profile::{default_profiles, Action, ActionMix, TestProfile};
pub use site::{Edge, Node, SiteModel};
