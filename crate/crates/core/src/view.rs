use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// User view of the target application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Professor,
    Student,
    Public,
}

impl View {
    pub const ALL: [View; 3] = [View::Professor, View::Student, View::Public];

    pub fn as_str(self) -> &'static str {
        match self {
            View::Professor => "professor",
            View::Student => "student",
            View::Public => "public",
        }
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for View {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "professor" => Ok(View::Professor),
            "student" => Ok(View::Student),
            "public" => Ok(View::Public),
            other => Err(format!("unknown view `{other}`")),
        }
    }
}

/// Sampling weights over the three views.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewMix {
    pub professor: f64,
    pub student: f64,
    pub public: f64,
}

impl Default for ViewMix {
    fn default() -> Self {
        ViewMix {
            professor: 1.0 / 3.0,
            student: 1.0 / 3.0,
            public: 1.0 / 3.0,
        }
    }
}

impl ViewMix {
    pub fn weight(&self, view: View) -> f64 {
        match view {
            View::Professor => self.professor,
            View::Student => self.student,
            View::Public => self.public,
        }
    }

    /// Weights are non-negative, finite and sum to one (within 1e-9).
    pub fn is_valid(&self) -> bool {
        let ws = [self.professor, self.student, self.public];
        ws.iter().all(|w| w.is_finite() && *w >= 0.0) && (ws.iter().sum::<f64>() - 1.0).abs() <= 1e-9
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> View {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for view in View::ALL {
            acc += self.weight(view);
            if u < acc {
                return view;
            }
        }
        View::Public
    }
}
