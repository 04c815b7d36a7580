use std::fmt;
use std::str::FromStr;

use ei_core::View;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Insert,
    Delete,
    Update,
    Read,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Insert, Action::Delete, Action::Update, Action::Read];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Insert => "insert",
            Action::Delete => "delete",
            Action::Update => "update",
            Action::Read => "read",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "insert" => Ok(Action::Insert),
            "delete" => Ok(Action::Delete),
            "update" => Ok(Action::Update),
            "read" => Ok(Action::Read),
            other => Err(format!("unknown action `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionMix {
    pub insert: f64,
    pub delete: f64,
    pub update: f64,
    pub read: f64,
}

impl ActionMix {
    pub const READ_ONLY: ActionMix = ActionMix { insert: 0.0, delete: 0.0, update: 0.0, read: 1.0 };

    pub fn weight(&self, action: Action) -> f64 {
        match action {
            Action::Insert => self.insert,
            Action::Delete => self.delete,
            Action::Update => self.update,
            Action::Read => self.read,
        }
    }

    pub fn permits(&self, action: Action) -> bool {
        self.weight(action) > 0.0
    }

    /// Draw from the mix restricted to `allowed`. `None` when nothing allowed
    /// carries weight.
    pub fn sample_among<R: Rng + ?Sized>(&self, allowed: &[Action], rng: &mut R) -> Option<Action> {
        let total: f64 = allowed.iter().map(|a| self.weight(*a)).sum();
        if total <= 0.0 {
            return None;
        }
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last = None;
        for &a in allowed {
            let w = self.weight(a);
            if w <= 0.0 {
                continue;
            }
            acc += w;
            last = Some(a);
            if u < acc {
                return Some(a);
            }
        }
        last
    }
}

/// A user view, its login data and the actions it exercises.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestProfile {
    pub view: View,
    /// Bearer token sent with every request; public profiles carry none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credentials: Option<String>,
    pub action_mix: ActionMix,
}

impl TestProfile {
    pub fn validate(&self) -> Result<()> {
        let ws = Action::ALL.map(|a| self.action_mix.weight(a));
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) || ws.iter().sum::<f64>() <= 0.0 {
            return Err(HarnessError::InvalidProfile(format!("{} profile: weights must be non-negative with a positive sum", self.view)));
        }
        if self.view == View::Public && Action::ALL.iter().any(|a| *a != Action::Read && self.action_mix.permits(*a)) {
            return Err(HarnessError::InvalidProfile("public profiles may only read".into()));
        }
        Ok(())
    }
}

/// One profile per view using the mock target's tokens.
pub fn default_profiles() -> Vec<TestProfile> {
    let crud = ActionMix { insert: 0.2, delete: 0.1, update: 0.2, read: 0.5 };
    vec![
        TestProfile { view: View::Professor, credentials: Some(crate::mock::PROFESSOR_TOKEN.into()), action_mix: crud },
        TestProfile { view: View::Student, credentials: Some(crate::mock::STUDENT_TOKEN.into()), action_mix: crud },
        TestProfile { view: View::Public, credentials: None, action_mix: ActionMix::READ_ONLY },
    ]
}
