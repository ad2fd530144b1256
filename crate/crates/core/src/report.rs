//! Verification reports: named residual checks against pinned tolerances.

use serde::{Deserialize, Serialize};

/// Version of the `report.json` layout. Bump on any field change.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `residual <= tolerance`. A NaN residual never passes.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// A boolean check, recorded as residual 0 (holds) or 1 (violated) against tolerance 0.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self::new(name, if holds { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub seed: u64,
    pub command: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    /// Overall verdict; refreshed by [`VerificationReport::to_json`].
    pub passed: bool,
    pub metadata: Metadata,
    pub checks: Vec<Check>,
    /// Command-specific findings (verdicts, fitted values, file names).
    pub summary: serde_json::Map<String, serde_json::Value>,
}

impl Default for VerificationReport {
    fn default() -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            passed: true,
            metadata: Metadata::default(),
            checks: Vec::new(),
            summary: serde_json::Map::new(),
        }
    }
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.summary.extend(other.summary);
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.summary.insert(key.to_string(), value);
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut doc = self.clone();
        doc.passed = self.passed();
        let mut out = serde_json::to_string_pretty(&doc).expect("report is serializable");
        out.push('\n');
        out
    }

    /// Prefixes every check and summary name with `prefix/`.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for c in &mut self.checks {
            c.name = format!("{prefix}/{}", c.name);
        }
        self.summary = std::mem::take(&mut self.summary)
            .into_iter()
            .map(|(k, v)| (format!("{prefix}/{k}"), v))
            .collect();
        self
    }

    /// Overall verdict: every check passes. An empty report passes.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    /// Plain-text rendering, one line per check.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "command: {}\nversion: {}\nseed: {}\n",
            self.metadata.command, self.metadata.version, self.metadata.seed
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}  residual={:e}  tolerance={:e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            ));
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}: {v}\n"));
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "overall: {} ({} checks, {} failed)\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_passes() {
        let r = VerificationReport::new();
        assert!(r.passed());
        let json = r.to_json();
        assert!(json.contains("\"checks\": []"));
        assert!(json.ends_with("}\n"));
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn nan_residual_fails() {
        assert!(!Check::new("n", f64::NAN, 1.0).pass);
        assert!(Check::new("b", 1.0, 1.0).pass);
    }

    #[test]
    fn overall_requires_every_check() {
        let mut r = VerificationReport::new();
        r.push(Check::new("a", 0.0, 1e-12));
        r.push(Check::new("b", 1.0, 1e-12));
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        assert!(r.to_text().contains("[FAIL] b"));
        assert!(r.to_json().contains("\"passed\": false"));
    }
}
