use serde::{Deserialize, Serialize};

use super::config::{CheckKind, ScenarioConfig};
use crate::bounds::{BoundConstants, BoundReport};
use crate::lab::{BudgetCheck, ModulusTable, Verdict, WitnessPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Passed,
    Failed,
    /// The check ran; its output is a reading rather than a pass/fail test.
    Info,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub n: u32,
    #[serde(flatten)]
    pub pair: WitnessPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckOutcome {
    Modulus { table: ModulusTable },
    IntegralUc { a: ModulusTable, f: ModulusTable },
    Bounds { constants: Option<BoundConstants>, reports: Vec<BoundReport> },
    Witnesses { pairs: Vec<WitnessEntry> },
    Budget { constants: BoundConstants, checks: Vec<BudgetCheck> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: CheckKind,
    pub status: CheckStatus,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
    pub outcome: Option<CheckOutcome>,
}

impl CheckResult {
    pub fn failed_bounds(&self) -> usize {
        match &self.outcome {
            Some(CheckOutcome::Bounds { reports, .. }) => reports.iter().filter(|r| !r.passed).count(),
            Some(CheckOutcome::Budget { checks, .. }) => {
                checks.iter().flat_map(|c| &c.reports).filter(|r| !r.passed).count()
            }
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: bool,
    pub exit_code: i32,
    pub checks_run: usize,
    pub errors: usize,
    pub failed_bounds: usize,
}

impl Summary {
    /// Exit code 0 iff every gating check passed and no check errored.
    pub fn from_results(results: &[CheckResult]) -> Self {
        let errors = results.iter().filter(|r| r.status == CheckStatus::Error).count();
        let gate_failed = results.iter().any(|r| r.check.is_gate() && r.status == CheckStatus::Failed);
        let passed = errors == 0 && !gate_failed;
        Self {
            passed,
            exit_code: if passed { 0 } else { 1 },
            checks_run: results.len(),
            errors,
            failed_bounds: results.iter().map(CheckResult::failed_bounds).sum(),
        }
    }
}

/// Wall-clock figures, the only nondeterministic part of a report.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    /// Seconds per entry of `results`, same order.
    pub check_seconds: Vec<f64>,
}

/// Key order on output: `tool`, `version`, `config`, `results`, `summary`,
/// `warnings`, `timing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub config: ScenarioConfig,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}
