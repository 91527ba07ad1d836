use serde::Serialize;
use serde_json::{json, Value};

/// One pass/fail criterion evaluated by an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// What was measured, in words.
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Data files, by name.
    pub files: Vec<(String, Vec<u8>)>,
    /// Command-specific results for `summary.json`.
    pub results: Value,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(f, _)| f == name)
            .map(|(_, b)| b.as_slice())
    }

    pub(crate) fn summary_json(&self) -> Value {
        json!({
            "all_passed": self.passed(),
            "checks": self.checks,
            "results": self.results,
        })
    }
}
