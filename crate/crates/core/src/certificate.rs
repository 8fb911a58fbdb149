use std::fmt;

use serde::Serialize;

/// One verified inequality: `value` compared against `bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
    /// Informational checks are reported but do not affect the verdict.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

impl Check {
    /// Passes when `value ≤ bound`.
    pub fn at_most(
        name: impl Into<String>,
        value: f64,
        bound: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: value <= bound,
            value,
            bound,
            detail: detail.into(),
            informational: false,
        }
    }

    /// Passes when `value > bound`.
    pub fn above(
        name: impl Into<String>,
        value: f64,
        bound: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: value > bound,
            value,
            bound,
            detail: detail.into(),
            informational: false,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match (self.passed, self.informational) {
            (_, true) => "INFO",
            (true, false) => "PASS",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "[{tag}] {}: {:.6e} vs {:.6e}",
            self.name, self.value, self.bound
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Certificate {
    pub fn new(checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed || c.informational);
        Self { checks, passed }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed && !c.informational)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        write!(
            f,
            "verdict: {}",
            if self.passed { "CERTIFIED" } else { "REJECTED" }
        )
    }
}
