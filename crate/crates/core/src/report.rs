//! Run reports: the JSON the tool emits for every command and suite.
//!
//! A report is deterministic given (inputs, seed): counts live in ordered
//! maps, records appear in the order the checks are declared, and wall-clock
//! times are only attached when explicitly requested, so two runs with the
//! same inputs and seed render byte-identical JSON.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::io::FieldSpec;

pub const TOOL_NAME: &str = "quadlab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One verification step inside a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Content-based check id, e.g. "triad-centers".
    pub check: String,
    /// "full" or "sample".
    pub mode: String,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
    pub witnesses: Vec<serde_json::Value>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl CheckRecord {
    pub fn full(check: &str) -> CheckRecord {
        CheckRecord {
            check: check.to_string(),
            mode: "full".into(),
            seed: 0,
            counts: BTreeMap::new(),
            witnesses: Vec::new(),
            pass: true,
            wall_ms: None,
        }
    }

    pub fn sampled(check: &str, seed: u64) -> CheckRecord {
        CheckRecord { mode: "sample".into(), seed, ..CheckRecord::full(check) }
    }

    pub fn count(mut self, key: &str, value: u64) -> CheckRecord {
        self.counts.insert(key.to_string(), value);
        self
    }

    pub fn witness(mut self, w: serde_json::Value) -> CheckRecord {
        self.witnesses.push(w);
        self
    }

    pub fn outcome(mut self, pass: bool) -> CheckRecord {
        self.pass = pass;
        self
    }
}

/// The whole run: tool identity, command echo, instance, and check records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub instance: String,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
    pub pass: bool,
}

impl RunReport {
    pub fn new(command: &str, instance: &str, seed: u64) -> RunReport {
        RunReport {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.to_string(),
            field: None,
            instance: instance.to_string(),
            seed,
            records: Vec::new(),
            pass: true,
        }
    }

    pub fn with_field(mut self, spec: FieldSpec) -> RunReport {
        self.field = Some(spec);
        self
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.pass &= record.pass;
        self.records.push(record);
    }

    /// Runs `work`, attaches wall time to its record iff `timings`.
    pub fn push_timed(&mut self, timings: bool, work: impl FnOnce() -> CheckRecord) {
        let start = Instant::now();
        let mut record = work();
        if timings {
            record.wall_ms = Some(start.elapsed().as_millis() as u64);
        }
        self.push(record);
    }

    pub fn render(&self) -> String {
        crate::io::render_json(self).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_fail_when_any_record_fails_and_render_deterministically() {
        let build = || {
            let mut r = RunReport::new("gq check", "T(1,2,3)", 0);
            r.push(CheckRecord::full("axioms").count("v", 112).count("b", 280));
            r.push(
                CheckRecord::sampled("triad-centers", 7)
                    .count("triads", 10)
                    .outcome(false)
                    .witness(serde_json::json!({"triad": [1, 2, 3]})),
            );
            r
        };
        let a = build();
        let b = build();
        assert!(!a.pass);
        assert_eq!(a.render(), b.render());
        assert!(a.render().contains("\"triad-centers\""));
        assert!(!a.render().contains("wall_ms"));
    }

    #[test]
    fn wall_times_appear_only_when_requested() {
        let mut r = RunReport::new("suite smoke", "T(1,2,3)", 0);
        r.push_timed(false, || CheckRecord::full("axioms"));
        assert!(r.records[0].wall_ms.is_none());
        let mut r2 = RunReport::new("suite smoke", "T(1,2,3)", 0);
        r2.push_timed(true, || CheckRecord::full("axioms"));
        assert!(r2.records[0].wall_ms.is_some());
    }
}
