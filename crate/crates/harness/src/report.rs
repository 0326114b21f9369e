//! Machine-readable run summaries (`summary.json`).

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{HarnessError, Result};

/// One monitored invariant with the value that decided it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: value <= bound,
            value,
            bound,
        }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: value >= bound,
            value,
            bound,
        }
    }

    pub fn flag(name: &str, pass: bool) -> Self {
        Self {
            name: name.to_string(),
            pass,
            value: if pass { 0.0 } else { 1.0 },
            bound: 0.0,
        }
    }
}

/// What a command produced: invariant checks, headline numbers and the
/// lines printed to the terminal.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub metrics: Map<String, Value>,
    pub lines: Vec<String>,
}

impl Report {
    pub fn metric(&mut self, key: &str, v: impl Into<Value>) {
        self.metrics.insert(key.to_string(), v.into());
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn violated(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub status: String,
    pub exit_code: i32,
    pub violated: Vec<String>,
    pub error: Option<ErrorInfo>,
    pub invariants: Vec<Check>,
    pub metrics: Map<String, Value>,
}

impl Summary {
    pub fn from_outcome(command: &str, outcome: &Result<Report>) -> Self {
        match outcome {
            Ok(r) => {
                let violated = r.violated();
                let code = if violated.is_empty() { 0 } else { 4 };
                Summary {
                    command: command.to_string(),
                    status: if code == 0 { "ok" } else { "invariant-violation" }.to_string(),
                    exit_code: code,
                    violated,
                    error: None,
                    invariants: r.checks.clone(),
                    metrics: r.metrics.clone(),
                }
            }
            Err(e) => Summary {
                command: command.to_string(),
                status: "error".to_string(),
                exit_code: e.exit_code(),
                violated: vec![e.kind().to_string()],
                error: Some(ErrorInfo {
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                }),
                invariants: Vec::new(),
                metrics: Map::new(),
            },
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_check_gives_exit_4() {
        let mut r = Report::default();
        r.check(Check::at_most("a", 1.0, 2.0));
        r.check(Check::at_least("b", 1.0, 2.0));
        let s = Summary::from_outcome("run", &Ok(r));
        assert_eq!(s.exit_code, 4);
        assert_eq!(s.violated, vec!["b".to_string()]);
    }

    #[test]
    fn errors_are_named() {
        let e: Result<Report> = Err(HarnessError::Config("x".into()));
        let s = Summary::from_outcome("run", &e);
        assert_eq!(s.exit_code, 2);
        assert_eq!(s.error.unwrap().kind, "config");
    }
}
