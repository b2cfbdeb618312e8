//! Machine-readable verification reports.
//!
//! A report is JSON-first: the serialized form is byte-identical across runs
//! with the same seed and flags (wall time is kept out of the serialized
//! payload and shown only in the human summary).

use serde::Serialize;

/// One numeric check: an identifier, the claim it anchors to, the two sides
/// of the comparison and the tolerance at which they were compared.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Serialized failing instance, for replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    /// Wall-clock seconds; excluded from the serialized report so repeated
    /// runs stay byte-identical.
    #[serde(skip)]
    pub wall_seconds: f64,
}

impl VerifyReport {
    pub fn new(suite: &str, seed: u64, count: usize) -> Self {
        Self {
            suite: suite.to_string(),
            seed,
            count,
            checks: Vec::new(),
            passed: 0,
            failed: 0,
            wall_seconds: 0.0,
        }
    }

    pub fn push(&mut self, check: Check) {
        if check.pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.checks.push(check);
    }

    /// Convenience: `lhs` within `tolerance` of `rhs`.
    pub fn check_close(&mut self, id: String, anchor: &str, lhs: f64, rhs: f64, tolerance: f64) {
        self.push(Check {
            id,
            anchor: anchor.to_string(),
            lhs,
            rhs,
            tolerance,
            pass: (lhs - rhs).abs() <= tolerance,
            instance: None,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn human_summary(&self) -> String {
        format!(
            "suite {}: {}/{} checks passed (seed {}, {:.2}s)",
            self.suite,
            self.passed,
            self.passed + self.failed,
            self.seed,
            self.wall_seconds
        )
    }
}
