//! Structured pass/fail reports shared by every validator.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Result of a single named check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Pass,
    Fail,
    /// Reported but does not affect [`CheckReport::passed`].
    Warn,
    /// Not evaluated because a prerequisite check failed.
    Skipped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Warn => "WARN",
            Outcome::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    /// Stable machine identifier, e.g. `branching.f`.
    pub code: &'static str,
    /// Human readable condition name.
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
    /// Labels, pairs or triples that violate the condition.
    pub offenders: Vec<String>,
}

impl Check {
    pub fn is_failure(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    checks: Vec<Check>,
}

/// At most this many offenders are kept per check.
pub const MAX_OFFENDERS: usize = 16;

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn pass(&mut self, code: &'static str, name: &'static str, detail: impl Into<String>) {
        self.record(code, name, Outcome::Pass, detail.into(), Vec::new());
    }

    pub fn skip(&mut self, code: &'static str, name: &'static str, detail: impl Into<String>) {
        self.record(code, name, Outcome::Skipped, detail.into(), Vec::new());
    }

    /// Pass when `offenders` is empty, otherwise record `failure` as the outcome.
    pub fn verdict(
        &mut self,
        code: &'static str,
        name: &'static str,
        failure: Outcome,
        detail: impl Into<String>,
        mut offenders: Vec<String>,
    ) {
        let outcome = if offenders.is_empty() {
            Outcome::Pass
        } else {
            failure
        };
        offenders.truncate(MAX_OFFENDERS);
        self.record(code, name, outcome, detail.into(), offenders);
    }

    fn record(
        &mut self,
        code: &'static str,
        name: &'static str,
        outcome: Outcome,
        detail: String,
        offenders: Vec<String>,
    ) {
        self.checks.push(Check {
            code,
            name,
            outcome,
            detail,
            offenders,
        });
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn get(&self, code: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.code == code)
    }

    /// Conjunction over all checks; warnings and skips do not count as failures.
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::is_failure)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.is_failure())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.is_failure())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.outcome == Outcome::Warn)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{} {:<12} {}", c.outcome, c.code, c.name)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            if !c.offenders.is_empty() {
                write!(f, " [{}]", c.offenders.join(", "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
