//! The JSON report emitted by `relalg --json`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Enough data to reproduce a failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Arguments after the program name.
    pub command: Vec<String>,
    pub seed: u64,
    /// Wall-clock milliseconds per phase; present only with `--timings`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
    pub verdicts: Vec<Verdict>,
    /// Command-specific results.
    pub details: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64, timings: bool) -> Self {
        RunReport {
            command,
            seed,
            timings_ms: timings.then(BTreeMap::new),
            verdicts: Vec::new(),
            details: BTreeMap::new(),
            outputs: Vec::new(),
            error: None,
            passed: true,
        }
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is plain data")
    }

    pub fn verdict(&mut self, name: &str, passed: bool, witness: Option<Value>) {
        self.passed &= passed;
        self.verdicts.push(Verdict {
            name: name.to_string(),
            passed,
            witness,
        });
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report is plain data");
        self.details.insert(key.to_string(), v);
    }

    pub fn record_time(&mut self, phase: &str, ms: u64) {
        if let Some(t) = self.timings_ms.as_mut() {
            t.insert(phase.to_string(), ms);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = RunReport::new(vec!["check".into(), "m.ra".into()], 1, true);
        r.verdict("axioms", false, Some(serde_json::json!({"x": "a"})));
        r.detail("atoms", 4);
        r.record_time("check", 3);
        let back = RunReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(!back.passed);
    }
}
