//! Verification reports.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Inconclusive,
    Falsified,
}

/// Outcome of one instance-level check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub theorem: String,
    pub instance: String,
    pub status: Status,
    pub witness: Value,
}

impl Report {
    pub fn new(theorem: &str, instance: impl Into<String>, status: Status, witness: Value) -> Self {
        Self { theorem: theorem.to_string(), instance: instance.into(), status, witness }
    }

    pub fn verified(theorem: &str, instance: impl Into<String>, witness: Value) -> Self {
        Self::new(theorem, instance, Status::Verified, witness)
    }

    pub fn falsified(theorem: &str, instance: impl Into<String>, witness: Value) -> Self {
        Self::new(theorem, instance, Status::Falsified, witness)
    }

    pub fn inconclusive(theorem: &str, instance: impl Into<String>, witness: Value) -> Self {
        Self::new(theorem, instance, Status::Inconclusive, witness)
    }
}

/// Worst status among the reports; an empty list counts as verified.
pub fn overall(reports: &[Report]) -> Status {
    reports.iter().map(|r| r.status).max().unwrap_or(Status::Verified)
}

/// Process exit code for a status.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Verified => 0,
        Status::Inconclusive => 2,
        Status::Falsified => 1,
    }
}
