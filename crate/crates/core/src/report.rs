//! Residual reports returned by every `verify_*` routine.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    /// Records `residual ≤ tolerance`. A NaN residual always fails.
    pub fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            note: None,
        });
        self
    }

    /// Records `residual ≥ threshold` (negative controls).
    pub fn push_at_least(&mut self, name: impl Into<String>, residual: f64, threshold: f64) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            residual,
            tolerance: threshold,
            passed: residual >= threshold,
            note: Some("must be at least the tolerance".into()),
        });
        self
    }

    pub fn push_flag(&mut self, name: impl Into<String>, passed: bool, note: impl Into<String>) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            residual: if passed { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed,
            note: Some(note.into()),
        });
        self
    }

    pub fn extend(&mut self, other: Report) -> &mut Self {
        let prefix = other.title;
        self.checks.extend(other.checks.into_iter().map(|mut c| {
            c.name = format!("{prefix}: {}", c.name);
            c
        }));
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |acc, c| acc.max(c.residual))
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            let status = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "  [{status}] {:<48} {:.3e} (tol {:.1e})", c.name, c.residual, c.tolerance)?;
            if let Some(note) = &c.note {
                write!(f, "  {note}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
