//! Pass/fail reports with witnesses and metrics, serialized as
//! `{status, witnesses[], metrics{}}`.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub status: Status,
    pub witnesses: Vec<Value>,
    pub metrics: BTreeMap<String, Value>,
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

impl Report {
    pub fn new() -> Self {
        Report {
            status: Status::Pass,
            witnesses: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Records a named check; a failing check flips the status and keeps the witness.
    pub fn check(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> Value) {
        if !ok {
            self.status = Status::Fail;
            self.witnesses
                .push(serde_json::json!({ "check": name, "witness": witness() }));
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.to_string(), value.into());
    }

    pub fn merge(&mut self, prefix: &str, other: Report) {
        if !other.passed() {
            self.status = Status::Fail;
        }
        for w in other.witnesses {
            self.witnesses
                .push(serde_json::json!({ "in": prefix, "witness": w }));
        }
        for (k, v) in other.metrics {
            self.metrics.insert(format!("{prefix}.{k}"), v);
        }
    }
}
