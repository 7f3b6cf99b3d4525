use serde::{Deserialize, Serialize};

/// Number of standard errors allowed for Monte Carlo identity checks.
pub const SIGMA_THRESHOLD: f64 = 4.0;

/// Outcome of one numerical check: both sides, their combined standard
/// error, and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub stderr_combined: f64,
    /// `|lhs − rhs| / stderr_combined` (infinite when the error is zero and the sides differ).
    pub sigmas: f64,
    pub pass: bool,
    /// Hypotheses not met; a skipped check is neither a pass nor a failure.
    pub skipped: bool,
    pub details: String,
}

impl CheckReport {
    /// Monte Carlo identity: passes iff `|lhs − rhs| ≤ 4σ + abs_tol`, where
    /// `abs_tol` absorbs deterministic (quadrature) error and is recorded in
    /// the details.
    pub fn statistical(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        stderr_combined: f64,
        abs_tol: f64,
    ) -> Self {
        let diff = (lhs - rhs).abs();
        let sigmas = sigmas(diff, stderr_combined);
        let pass = diff <= SIGMA_THRESHOLD * stderr_combined + abs_tol;
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            stderr_combined,
            sigmas,
            pass,
            skipped: false,
            details: format!("|lhs-rhs|={diff:.3e} <= {SIGMA_THRESHOLD}*sigma + {abs_tol:.0e}"),
        }
    }

    /// Deterministic equality within an absolute tolerance.
    pub fn deterministic(name: impl Into<String>, lhs: f64, rhs: f64, abs_tol: f64) -> Self {
        let diff = (lhs - rhs).abs();
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            stderr_combined: 0.0,
            sigmas: sigmas(diff, 0.0),
            pass: diff <= abs_tol,
            skipped: false,
            details: format!("|lhs-rhs|={diff:.3e}, abs tol {abs_tol:.0e}"),
        }
    }

    /// One-sided inequality `lhs ≤ rhs + slack`.
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            stderr_combined: 0.0,
            sigmas: 0.0,
            pass: lhs <= rhs + slack,
            skipped: false,
            details: format!("lhs <= rhs + {slack:.0e} (margin {:.3e})", rhs - lhs),
        }
    }

    /// One-sided inequality `lhs ≥ rhs − slack`.
    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            stderr_combined: 0.0,
            sigmas: 0.0,
            pass: lhs >= rhs - slack,
            skipped: false,
            details: format!("lhs >= rhs - {slack:.0e} (margin {:.3e})", lhs - rhs),
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            stderr_combined: 0.0,
            sigmas: 0.0,
            pass: true,
            skipped: true,
            details: reason.into(),
        }
    }

    /// Failed and not skipped.
    pub fn failed(&self) -> bool {
        !self.pass && !self.skipped
    }
}

fn sigmas(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}
