//! Machine-readable reports.

use gencourant_core::check::Residual;
use serde::Serialize;
use std::collections::BTreeMap;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity being measured.
    pub anchor: String,
    /// Largest absolute residual over the sample points; `null` if not finite.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Sample point of the largest residual; empty for pointwise-free checks.
    pub point: Vec<f64>,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str, r: Residual, tolerance: f64) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            pass: r.value <= tolerance,
            residual: r.value,
            tolerance,
            point: r.point,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SceneSummary {
    pub dim: usize,
    pub coords: Vec<String>,
    pub seed: u64,
    pub points: usize,
    pub policy: &'static str,
    pub tol_sym: f64,
    pub tol_fd: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub scene: SceneSummary,
    /// Sorted by name.
    pub checks: Vec<CheckRecord>,
    /// On-shell verdicts and notes; informational, they do not affect `pass`.
    pub verdicts: BTreeMap<String, String>,
    pub pass: bool,
    pub timing_ms: f64,
}

impl Report {
    pub fn new(command: &str, scene: SceneSummary, mut checks: Vec<CheckRecord>, verdicts: BTreeMap<String, String>) -> Report {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = checks.iter().all(|c| c.pass);
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            scene,
            checks,
            verdicts,
            pass,
            timing_ms: 0.0,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary() -> SceneSummary {
        SceneSummary {
            dim: 2,
            coords: vec!["x".into(), "y".into()],
            seed: 0,
            points: 1,
            policy: "project",
            tol_sym: 1e-9,
            tol_fd: 1e-6,
        }
    }

    #[test]
    fn checks_are_sorted_and_nan_fails() {
        let r = |v: f64| Residual {
            value: v,
            point: vec![0.5, 0.25],
        };
        let rep = Report::new(
            "demo",
            summary(),
            vec![CheckRecord::new("b", "", r(0.0), 1e-9), CheckRecord::new("a", "", r(f64::NAN), 1e-9)],
            BTreeMap::new(),
        );
        assert_eq!(rep.checks[0].name, "a");
        assert!(!rep.pass);
        assert_eq!(rep.failures().count(), 1);
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert!(json["checks"][0]["residual"].is_null());
        assert_eq!(json["checks"][0]["point"][1], 0.25);
    }
}
