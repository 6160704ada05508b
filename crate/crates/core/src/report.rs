//! Verification reports: a named list of pass/fail checks plus a dimension
//! table. JSON is the machine format; the table is a rendering of it.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

/// One named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of one verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub dims: BTreeMap<String, usize>,
    pub elapsed_ms: u64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl Report {
    pub fn new(theorem: &str) -> Report {
        Report {
            theorem: theorem.to_string(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            dims: BTreeMap::new(),
            elapsed_ms: 0,
            started: Some(Instant::now()),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(Check { name: name.to_string(), pass, detail: detail.into() });
        self
    }

    pub fn dim(&mut self, key: &str, value: usize) -> &mut Self {
        self.dims.insert(key.to_string(), value);
        self
    }

    /// Append the checks and dims of another report, prefixing its names.
    pub fn absorb(&mut self, prefix: &str, other: Report) -> &mut Self {
        for c in other.checks {
            self.checks.push(Check { name: format!("{prefix}.{}", c.name), ..c });
        }
        for (k, v) in other.dims {
            self.dims.insert(format!("{prefix}.{k}"), v);
        }
        self
    }

    /// Stamp the elapsed time; idempotent after the first call.
    pub fn finish(mut self) -> Report {
        if let Some(s) = self.started.take() {
            self.elapsed_ms = s.elapsed().as_millis() as u64;
        }
        self
    }

    /// True iff every check passes (and there is at least one).
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }

    /// Human-readable table of the same data.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{} [{verdict}] ({} ms)", self.theorem, self.elapsed_ms);
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "  params: {}", ps.join(" "));
        }
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "  {mark} {:<w$}  {}", c.name, c.detail);
        }
        if !self.dims.is_empty() {
            let ds: Vec<String> = self.dims.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "  dims: {}", ds.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("demo");
        r.param("p", 5).param("r", vec![10, 4]);
        r.check("a", true, "fine").check("b", false, "broken");
        r.dim("quotient", 18);
        let r = r.finish();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, Report { started: None, ..r.clone() });
        assert!(!r.pass());
        assert_eq!(r.failed().len(), 1);
        assert!(r.render().contains("FAIL b"));
    }

    #[test]
    fn empty_report_does_not_pass() {
        assert!(!Report::new("x").pass());
    }
}
