//! Project directory layout:
//!
//! ```text
//! <project>/
//!   .ei.lock                      held while a command runs
//!   site.json                     latest crawl
//!   phases/<label>/
//!     config.json                 command, seed and full config snapshot
//!     raw_samples.txt             values before screening
//!     samples.txt                 retained values
//!     discarded.csv               value,reason
//!     histogram.csv               lower_edge,count
//!     fit.json                    fit report
//!     timing.json                 wall clock; not reproducible
//!     ...                         command-specific extras
//!   work/<label>/round-NNNN/      tester logs of an evaluation
//!   comparisons/<a>__vs__<b>/
//!     comparison.json
//!     overlay.csv                 x,pdf_a,pdf_b
//! ```

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct Project {
    root: PathBuf,
}

impl Project {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Project { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn phase_dir(&self, label: &str) -> Result<PathBuf, CliError> {
        check_label(label)?;
        Ok(self.root.join("phases").join(label))
    }

    pub fn work_dir(&self, label: &str) -> Result<PathBuf, CliError> {
        check_label(label)?;
        Ok(self.root.join("work").join(label))
    }

    pub fn comparison_dir(&self, a: &str, b: &str) -> Result<PathBuf, CliError> {
        check_label(a)?;
        check_label(b)?;
        Ok(self.root.join("comparisons").join(format!("{a}__vs__{b}")))
    }

    /// Take the project lock; released when the guard drops.
    pub fn lock(&self) -> Result<ProjectLock, CliError> {
        fs::create_dir_all(&self.root).map_err(|e| CliError::io(&self.root, e))?;
        let path = self.root.join(".ei.lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(ProjectLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked { path }),
            Err(e) => Err(CliError::io(&path, e)),
        }
    }
}

/// Labels become directory names.
fn check_label(label: &str) -> Result<(), CliError> {
    let ok = !label.is_empty()
        && !label.starts_with('.')
        && label.chars().all(|c| c.is_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!("bad phase label `{label}`: use letters, digits, '-', '_' or '.'")))
    }
}

pub struct ProjectLock {
    path: PathBuf,
}

impl Drop for ProjectLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("artifact types serialize") + "\n";
    write_text(path, &text)
}
