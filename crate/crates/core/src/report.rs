//! Inequality bookkeeping shared by the comparison checks.

use serde::Serialize;

/// One inequality `lhs <= rhs`, considered satisfied when
/// `slack = rhs - lhs >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityEntry {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InequalityReport {
    pub entries: Vec<InequalityEntry>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub(crate) fn push(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) {
        let slack = if lhs == rhs { 0.0 } else { rhs - lhs };
        self.entries.push(InequalityEntry {
            name: name.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            holds: slack >= -tolerance,
        });
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn min_slack(&self) -> f64 {
        self.entries.iter().map(|e| e.slack).fold(f64::INFINITY, f64::min)
    }
}
