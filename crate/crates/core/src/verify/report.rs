use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::families::TrialSpec;
use crate::error::{QjdError, Result};
use crate::json::fmt_sig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Pass,
    Fail,
    /// The trial's inputs violate a precondition of the checked operation.
    InvalidInput,
    /// The construction itself raised an error; counts as a failure.
    Error,
    /// Measured for the record only; no pass/fail criterion applies.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub spec: TrialSpec,
    /// Sweep parameter `t`, for continuity sweeps.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parameter: Option<f64>,
    pub error: Option<f64>,
    /// `None` means the point is unconstrained.
    pub tolerance: Option<f64>,
    pub status: TrialStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl TrialRecord {
    /// Record with status derived from `error <= tolerance`.
    pub fn measured(index: usize, spec: TrialSpec, error: f64, tolerance: Option<f64>) -> Self {
        let pass = match tolerance {
            Some(tol) => error <= tol,
            None => true,
        };
        Self {
            index,
            spec,
            parameter: None,
            error: Some(error),
            tolerance,
            status: if pass {
                TrialStatus::Pass
            } else {
                TrialStatus::Fail
            },
            detail: None,
        }
    }

    pub fn invalid(index: usize, spec: TrialSpec, why: &QjdError) -> Self {
        Self {
            index,
            spec,
            parameter: None,
            error: None,
            tolerance: None,
            status: TrialStatus::InvalidInput,
            detail: Some(why.to_string()),
        }
    }

    pub fn errored(index: usize, spec: TrialSpec, why: &QjdError) -> Self {
        Self {
            status: TrialStatus::Error,
            ..Self::invalid(index, spec, why)
        }
    }

    pub fn with_parameter(mut self, t: f64) -> Self {
        self.parameter = Some(t);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// One point of a continuity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Index of the sweep within a multi-sweep report.
    pub sweep: usize,
    pub t: f64,
    pub w1_distance: f64,
}

/// Outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    /// Every parameter the suite ran with.
    pub config: serde_json::Value,
    pub trials: Vec<TrialRecord>,
    pub max_error: Option<f64>,
    pub passed: usize,
    pub failed: usize,
    pub invalid: usize,
    pub recorded: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<Vec<SweepPoint>>,
    pub wall_time_ms: f64,
}

impl VerificationReport {
    /// Tallies the records. Fails with [`QjdError::NoValidTrials`] if every
    /// trial was an invalid input.
    pub fn assemble(
        suite: impl Into<String>,
        config: serde_json::Value,
        trials: Vec<TrialRecord>,
        sweep: Option<Vec<SweepPoint>>,
        wall_time_ms: f64,
    ) -> Result<Self> {
        let count = |s: TrialStatus| trials.iter().filter(|t| t.status == s).count();
        let max_error = trials
            .iter()
            .filter(|t| matches!(t.status, TrialStatus::Pass | TrialStatus::Fail))
            .filter_map(|t| t.error)
            .fold(None, |acc: Option<f64>, e| {
                Some(acc.map_or(e, |a| a.max(e)))
            });
        let report = Self {
            suite: suite.into(),
            config,
            passed: count(TrialStatus::Pass),
            failed: count(TrialStatus::Fail) + count(TrialStatus::Error),
            invalid: count(TrialStatus::InvalidInput),
            recorded: count(TrialStatus::Recorded),
            trials,
            max_error,
            sweep,
            wall_time_ms,
        };
        if report.passed + report.failed + report.recorded == 0 {
            return Err(QjdError::NoValidTrials(Box::new(report)));
        }
        Ok(report)
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Fixed-width human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite: {}", self.suite);
        let _ = writeln!(
            out,
            "passed {}  failed {}  invalid {}  recorded {}  max error {}",
            self.passed,
            self.failed,
            self.invalid,
            self.recorded,
            self.max_error.map_or("-".to_string(), |e| fmt_sig(e, 12)),
        );
        let _ = writeln!(
            out,
            "{:>5} {:>4} {:>4} {:>20} {:>14} {:>19} {:>19} {:>19} {:>13}",
            "trial", "dim", "nobs", "seed", "family", "t", "error", "tolerance", "status"
        );
        for t in &self.trials {
            let num = |x: Option<f64>| x.map_or("-".to_string(), |v| fmt_sig(v, 12));
            let status = serde_json::to_value(t.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:>5} {:>4} {:>4} {:>20} {:>14} {:>19} {:>19} {:>19} {:>13}",
                t.index,
                t.spec.dim,
                t.spec.n_obs,
                t.spec.seed,
                t.spec.family.to_string(),
                num(t.parameter),
                num(t.error),
                num(t.tolerance),
                status,
            );
            if let Some(d) = &t.detail {
                let _ = writeln!(out, "      {d}");
            }
        }
        out
    }

    /// `t,w1_distance` rows for sweep reports (with a `sweep` column when
    /// the report holds more than one sweep).
    pub fn sweep_csv(&self) -> Option<String> {
        let points = self.sweep.as_ref()?;
        let multi = points.iter().any(|p| p.sweep != 0);
        let mut out = String::from(if multi {
            "sweep,t,w1_distance\n"
        } else {
            "t,w1_distance\n"
        });
        for p in points {
            if multi {
                let _ = writeln!(out, "{},{:.16e},{:.16e}", p.sweep, p.t, p.w1_distance);
            } else {
                let _ = writeln!(out, "{:.16e},{:.16e}", p.t, p.w1_distance);
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Family;

    fn spec() -> TrialSpec {
        TrialSpec::new(2, 1, 0, Family::Generic).unwrap()
    }

    #[test]
    fn pass_iff_error_within_tolerance() {
        assert_eq!(
            TrialRecord::measured(0, spec(), 1e-9, Some(1e-8)).status,
            TrialStatus::Pass
        );
        assert_eq!(
            TrialRecord::measured(0, spec(), 1e-8, Some(1e-8)).status,
            TrialStatus::Pass
        );
        assert_eq!(
            TrialRecord::measured(0, spec(), 2e-8, Some(1e-8)).status,
            TrialStatus::Fail
        );
        assert_eq!(
            TrialRecord::measured(0, spec(), f64::NAN, Some(1e-8)).status,
            TrialStatus::Fail
        );
        assert_eq!(
            TrialRecord::measured(0, spec(), 5.0, None).status,
            TrialStatus::Pass
        );
    }

    #[test]
    fn tallies_and_max_error() {
        let trials = vec![
            TrialRecord::measured(0, spec(), 1e-12, Some(1e-8)),
            TrialRecord::measured(1, spec(), 3e-8, Some(1e-8)),
            TrialRecord::invalid(2, spec(), &QjdError::EmptyAxisSet),
            TrialRecord::errored(3, spec(), &QjdError::EmptyAxisSet),
        ];
        let r =
            VerificationReport::assemble("t", serde_json::Value::Null, trials, None, 0.0).unwrap();
        assert_eq!((r.passed, r.failed, r.invalid), (1, 2, 1));
        assert_eq!(r.max_error, Some(3e-8));
        assert!(!r.all_passed());
        assert!(r.to_table().contains("invalid_input"));
    }

    #[test]
    fn all_invalid_is_an_error() {
        let trials = vec![TrialRecord::invalid(0, spec(), &QjdError::EmptyAxisSet)];
        let err = VerificationReport::assemble("t", serde_json::Value::Null, trials, None, 0.0)
            .unwrap_err();
        assert!(matches!(err, QjdError::NoValidTrials(r) if r.invalid == 1));
    }

    #[test]
    fn csv_layout() {
        let points = vec![
            SweepPoint {
                sweep: 0,
                t: 0.1,
                w1_distance: 0.05,
            },
            SweepPoint {
                sweep: 0,
                t: 0.01,
                w1_distance: 0.005,
            },
        ];
        let r = VerificationReport::assemble(
            "s",
            serde_json::Value::Null,
            vec![TrialRecord::measured(0, spec(), 0.05, None)],
            Some(points),
            0.0,
        )
        .unwrap();
        let csv = r.sweep_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,w1_distance"));
        assert_eq!(
            lines.next(),
            Some("1.0000000000000001e-1,5.0000000000000003e-2")
        );
    }
}
