use serde::{Deserialize, Serialize};

use crate::algebra::BasisIndex;

/// Maximum number of violations kept in a report.
pub const MAX_VIOLATIONS: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub indices: Vec<BasisIndex>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checked: u64,
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub truncated: u64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn is_zero(n: &u64) -> bool {
    *n == 0
}

impl VerificationReport {
    pub fn passing(checked: u64) -> Self {
        ReportBuilder { checked, ..ReportBuilder::default() }.finish()
    }

    /// Combines reports of independent checks over the same input.
    pub fn combine(parts: impl IntoIterator<Item = VerificationReport>) -> VerificationReport {
        let mut b = ReportBuilder::default();
        let mut notes = Vec::new();
        let mut pass = true;
        for part in parts {
            pass &= part.pass;
            b.checked += part.checked;
            b.truncated += part.truncated;
            for v in part.violations {
                b.push(v);
            }
            notes.extend(part.notes);
        }
        let mut out = b.finish();
        out.pass = pass && out.pass;
        out.notes = notes;
        out
    }

    pub fn violation_count(&self) -> u64 {
        self.violations.len() as u64 + self.truncated
    }
}

/// Accumulates checks and violations, truncating after [`MAX_VIOLATIONS`].
#[derive(Clone, Debug, Default)]
pub struct ReportBuilder {
    pub checked: u64,
    violations: Vec<Violation>,
    truncated: u64,
}

impl ReportBuilder {
    pub fn new() -> Self {
        ReportBuilder::default()
    }

    pub fn push(&mut self, v: Violation) {
        if self.violations.len() < MAX_VIOLATIONS {
            self.violations.push(v);
        } else {
            self.truncated += 1;
        }
    }

    /// Whether further violations will only be counted.
    pub fn saturated(&self) -> bool {
        self.violations.len() >= MAX_VIOLATIONS
    }

    /// Appends `other` after the entries already present.
    pub fn merge(&mut self, other: ReportBuilder) {
        self.checked += other.checked;
        self.truncated += other.truncated;
        for v in other.violations {
            self.push(v);
        }
    }

    pub fn finish(self) -> VerificationReport {
        VerificationReport {
            checked: self.checked,
            pass: self.violations.is_empty() && self.truncated == 0,
            violations: self.violations,
            truncated: self.truncated,
            notes: Vec::new(),
        }
    }
}

/// Order-preserving map, parallel when the `parallel` feature is on.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Runs `f` once per item and merges the builders in item order.
pub(crate) fn par_check<T: Sync>(items: &[T], f: impl Fn(&T) -> ReportBuilder + Sync + Send) -> VerificationReport {
    let mut out = ReportBuilder::new();
    for part in par_map(items, f) {
        out.merge(part);
    }
    out.finish()
}
