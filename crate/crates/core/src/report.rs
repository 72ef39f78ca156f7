//! Verification report records.

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of one verification suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    /// Statement the suite checks.
    #[serde(rename = "paper_anchor")]
    pub anchor: String,
    pub instances: usize,
    pub passes: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Accumulates instance outcomes for a suite.
pub struct SuiteRun {
    report: SuiteReport,
    start: Instant,
}

impl SuiteRun {
    pub fn new(name: &str, anchor: &str) -> Self {
        SuiteRun {
            report: SuiteReport {
                name: name.to_string(),
                anchor: anchor.to_string(),
                instances: 0,
                passes: 0,
                failures: 0,
                max_residual: 0.0,
                elapsed_ms: 0.0,
                notes: Vec::new(),
            },
            start: Instant::now(),
        }
    }

    /// Records one instance. Non-finite residuals are stored as `f64::MAX`
    /// so the report stays valid JSON.
    pub fn record(&mut self, pass: bool, residual: f64) {
        let r = if residual.is_finite() { residual } else { f64::MAX };
        self.report.instances += 1;
        if pass {
            self.report.passes += 1;
        } else {
            self.report.failures += 1;
        }
        self.report.max_residual = self.report.max_residual.max(r);
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.report.notes.push(msg.into());
    }

    pub fn finish(mut self) -> SuiteReport {
        self.report.elapsed_ms = self.start.elapsed().as_secs_f64() * 1e3;
        self.report
    }
}

/// Full report of a `verify` run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub schema_version: u32,
    pub seed: u64,
    pub rng: String,
    pub algebra: serde_json::Value,
    pub suites: Vec<SuiteReport>,
    pub overall: bool,
}

impl Report {
    pub fn new(seed: u64, algebra: serde_json::Value, suites: Vec<SuiteReport>) -> Self {
        let overall = suites.iter().all(SuiteReport::passed);
        Report {
            tool_version: TOOL_VERSION.to_string(),
            schema_version: SCHEMA_VERSION,
            seed,
            rng: crate::rng::RNG_ALGORITHM.to_string(),
            algebra,
            suites,
            overall,
        }
    }

    /// JSON with every `elapsed_ms` zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for s in &mut r.suites {
            s.elapsed_ms = 0.0;
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_tracks_failures() {
        let mut a = SuiteRun::new("a", "x");
        a.record(true, 1e-14);
        a.record(true, f64::NAN);
        let a = a.finish();
        assert_eq!((a.instances, a.passes, a.failures), (2, 2, 0));
        assert_eq!(a.max_residual, f64::MAX);
        let mut b = SuiteRun::new("b", "y");
        b.record(false, 0.5);
        let r = Report::new(1, serde_json::Value::Null, vec![a.clone(), b.finish()]);
        assert!(!r.overall);
        assert!(Report::new(1, serde_json::Value::Null, vec![a]).overall);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"paper_anchor\""));
    }
}
