//! Per-identity verification results and the versioned JSON report.

use serde::Serialize;

use crate::groupoid::ElementId;

pub const REPORT_VERSION: u32 = 1;

/// Outcome of checking one identity over all of its arguments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub arguments: usize,
    pub worst: Option<Vec<ElementId>>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Reported but excluded from the suite verdict.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
}

impl Check {
    pub fn from_residual(name: impl Into<String>, acc: Residual, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: acc.max <= tolerance,
            max_residual: acc.max,
            arguments: acc.count,
            worst: acc.worst,
            tolerance,
            note: None,
            informational: false,
        }
    }

    /// An exact check: the residual is the number of failing arguments.
    pub fn exact(name: impl Into<String>, arguments: usize, failures: usize, first: Option<Vec<ElementId>>) -> Self {
        Self {
            name: name.into(),
            max_residual: failures as f64,
            arguments,
            worst: first,
            tolerance: 0.0,
            passed: failures == 0,
            note: None,
            informational: false,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    /// Whether this check counts against its suite.
    pub fn failed(&self) -> bool {
        !self.passed && !self.informational
    }
}

/// Running maximum of a residual with the argument tuple that attains it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Residual {
    pub max: f64,
    pub count: usize,
    pub worst: Option<Vec<ElementId>>,
}

impl Residual {
    pub fn record(&mut self, value: f64, args: &[ElementId]) {
        self.count += 1;
        let value = if value.is_nan() { f64::INFINITY } else { value };
        let better = match &self.worst {
            None => true,
            Some(w) => value > self.max || (value == self.max && args < w.as_slice()),
        };
        if better {
            self.max = value;
            self.worst = Some(args.to_vec());
        }
    }

    /// Order-independent merge: larger residual wins, ties go to the smaller tuple.
    pub fn merge(mut self, other: Residual) -> Residual {
        self.count += other.count;
        match (&self.worst, &other.worst) {
            (_, None) => {}
            (None, Some(_)) => {
                self.max = other.max;
                self.worst = other.worst;
            }
            (Some(a), Some(b)) => {
                if other.max > self.max || (other.max == self.max && b < a) {
                    self.max = other.max;
                    self.worst = other.worst;
                }
            }
        }
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, checks: Vec<Check>) -> Self {
        let passed = !checks.iter().any(Check::failed);
        Self {
            suite: suite.into(),
            passed,
            checks,
            notes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub passed: bool,
    pub config: serde_json::Value,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn new(config: serde_json::Value, suites: Vec<SuiteReport>) -> Self {
        Self {
            report_version: REPORT_VERSION,
            passed: suites.iter().all(|s| s.passed),
            config,
            suites,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_is_order_independent() {
        let mut a = Residual::default();
        a.record(0.5, &[3, 1]);
        let mut b = Residual::default();
        b.record(0.5, &[1, 2]);
        b.record(0.1, &[0, 0]);
        let ab = a.clone().merge(b.clone());
        let ba = b.merge(a);
        assert_eq!(ab, ba);
        assert_eq!(ab.worst, Some(vec![1, 2]));
        assert_eq!(ab.count, 3);
    }
}
