use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A recorded discrepancy with a printed relation; never a failure.
    Finding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
    pub details: String,
}

impl CheckReport {
    /// A violation-typed check: passes iff `measured ≤ tolerance`.
    pub fn violation(name: &str, measured: f64, tolerance: f64, details: impl Into<String>) -> Self {
        let status = if measured <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            status,
            measured,
            tolerance,
            details: details.into(),
        }
    }

    pub fn finding(name: &str, measured: f64, tolerance: f64, details: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Finding,
            measured,
            tolerance,
            details: details.into(),
        }
    }

    /// A check whose computation itself broke down.
    pub fn errored(name: &str, tolerance: f64, err: &projkit::Error) -> Self {
        Self {
            name: name.into(),
            status: Status::Fail,
            measured: f64::INFINITY,
            tolerance,
            details: err.to_string(),
        }
    }
}

/// Output of `verify`: the checks sorted by name plus suite-specific records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub records: serde_json::Map<String, serde_json::Value>,
}

impl VerifyReport {
    pub fn new(suite: &str, seed: u64, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        Self {
            suite: suite.into(),
            seed,
            checks,
            records: serde_json::Map::new(),
        }
    }

    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.has_failures())
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}
