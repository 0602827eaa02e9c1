//! Machine-readable reports: per-suite JSON with one entry per check, CSV
//! scan tables, and the consolidated summary keyed by theorem tags.
//!
//! Reports are deterministic byte-for-byte for a fixed config and seed:
//! sorted keys, no timestamps.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of one invariant check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    /// Stable snake_case identifier.
    pub name: String,
    /// Theorem tag this check certifies (e.g. "thm_3_1_zero_detection").
    pub tag: String,
    /// Measured residual (whatever metric the check defines).
    pub measured: f64,
    /// The tolerance the residual is compared against.
    pub tolerance: f64,
    pub passed: bool,
    /// Present when the check was skipped; explains why.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl Check {
    pub fn measured(name: &str, tag: &str, measured: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            tag: tag.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            skipped: None,
        }
    }

    /// A check expressed as a plain predicate (measured 0/1 against 0).
    pub fn predicate(name: &str, tag: &str, ok: bool) -> Check {
        Check {
            name: name.into(),
            tag: tag.into(),
            measured: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: ok,
            skipped: None,
        }
    }

    pub fn skipped(name: &str, tag: &str, reason: &str) -> Check {
        Check {
            name: name.into(),
            tag: tag.into(),
            measured: f64::NAN,
            tolerance: f64::NAN,
            passed: true,
            skipped: Some(reason.into()),
        }
    }
}

/// JSON report of one verification suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub profile: String,
    pub seed: u64,
    pub lambda: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, profile: String, seed: u64, lambda: f64, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport { suite: suite.into(), profile, seed, lambda, checks, passed }
    }

    pub fn to_json(&self) -> Result<String> {
        // serde_json with a BTreeMap-backed value keeps keys sorted.
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&sort_value(value))? + "\n")
    }

    pub fn write_to(&self, dir: &Path) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("verify_{}.json", self.suite));
        std::fs::write(&path, self.to_json()?)?;
        Ok(path)
    }
}

fn sort_value(v: serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(map) => {
            let sorted: BTreeMap<String, serde_json::Value> =
                map.into_iter().map(|(k, val)| (k, sort_value(val))).collect();
            serde_json::to_value(sorted).expect("BTreeMap serializes")
        }
        serde_json::Value::Array(items) => {
            serde_json::Value::Array(items.into_iter().map(sort_value).collect())
        }
        other => other,
    }
}

/// A tabulated scan over a parameter grid, serialized as CSV.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ScanReport {
    pub fn new(columns: &[&str]) -> Self {
        ScanReport { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut file = std::fs::File::create(path)?;
        self.write_csv(&mut file)
    }
}

/// Consolidated summary merging suite JSONs (and noting scan CSVs) found in
/// an output directory, keyed by theorem tag.
pub fn consolidate(output_dir: &Path) -> Result<String> {
    if !output_dir.is_dir() {
        return Err(Error::MissingArtifact { path: output_dir.display().to_string() });
    }
    let mut tags: BTreeMap<String, Vec<serde_json::Value>> = BTreeMap::new();
    let mut suites_seen = Vec::new();
    let mut scans: Vec<String> = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(output_dir)?
        .collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().to_string();
        if name.starts_with("verify_") && name.ends_with(".json") {
            let text = std::fs::read_to_string(&path)?;
            let report: SuiteReport =
                serde_json::from_str(&text).map_err(|e| Error::MalformedArtifact {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?;
            suites_seen.push(report.suite.clone());
            for check in report.checks {
                tags.entry(check.tag.clone()).or_default().push(serde_json::json!({
                    "check": check.name,
                    "measured": check.measured,
                    "tolerance": check.tolerance,
                    "passed": check.passed,
                    "skipped": check.skipped,
                    "suite": report.suite,
                }));
            }
        } else if name.ends_with(".csv") {
            scans.push(name);
        } else if name == "zero_scan_summary.json" {
            let text = std::fs::read_to_string(&path)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::MalformedArtifact {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?;
            tags.entry("thm_3_1_zero_detection".into())
                .or_default()
                .push(value);
        }
    }
    if suites_seen.is_empty() && tags.is_empty() {
        return Err(Error::MissingArtifact {
            path: format!("{}/verify_*.json", output_dir.display()),
        });
    }
    let summary = serde_json::json!({
        "suites": suites_seen,
        "scans": scans,
        "by_theorem": tags,
    });
    Ok(serde_json::to_string_pretty(&sort_value(summary))? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_outcomes() {
        let ok = Check::measured("a", "t", 1e-9, 1e-8);
        assert!(ok.passed);
        let bad = Check::measured("a", "t", 1e-7, 1e-8);
        assert!(!bad.passed);
        let skip = Check::skipped("a", "t", "not applicable");
        assert!(skip.passed && skip.skipped.is_some());
    }

    #[test]
    fn suite_json_is_deterministic() {
        let r = SuiteReport::new(
            "specfun",
            "fast".into(),
            7,
            2.0,
            vec![Check::measured("x", "t", 0.0, 1.0)],
        );
        assert_eq!(r.to_json().unwrap(), r.to_json().unwrap());
    }

    #[test]
    fn consolidate_missing_dir_errors() {
        let r = consolidate(Path::new("/nonexistent/paths/xyz"));
        assert!(matches!(r, Err(Error::MissingArtifact { .. })));
    }

    #[test]
    fn consolidate_round_trip() {
        let dir = std::env::temp_dir().join(format!("sonine_report_test_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let r = SuiteReport::new(
            "specfun",
            "fast".into(),
            7,
            2.0,
            vec![Check::measured("reflection", "eq_1_1_multiplier", 1e-12, 1e-10)],
        );
        r.write_to(&dir).unwrap();
        let summary = consolidate(&dir).unwrap();
        assert!(summary.contains("eq_1_1_multiplier"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
