use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::QuadResult;

/// Smallest denominator used for relative residuals.
const TINY: f64 = 1e-300;
/// Multiplier on summed quadrature error estimates.
const SAFETY: f64 = 10.0;
/// Round-off allowance per unit of absolute term mass.
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;
/// Relative floor on inequality budgets so that equality cases are not decided by noise.
const INEQ_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub value: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    IdentityPass,
    InequalityPass { slack: f64 },
    Fail { diagnostic: String },
    Inadmissible { reason: String },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::IdentityPass => "identity_pass",
            Status::InequalityPass { .. } => "inequality_pass",
            Status::Fail { .. } => "fail",
            Status::Inadmissible { .. } => "inadmissible",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub params: serde_json::Value,
    pub terms: IndexMap<String, Term>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual_abs: f64,
    pub residual_rel: f64,
    pub status: Status,
    pub diagnostics: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        matches!(self.status, Status::IdentityPass | Status::InequalityPass { .. })
    }

    pub fn slack(&self) -> Option<f64> {
        match self.status {
            Status::InequalityPass { slack } => Some(slack),
            _ => None,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.get(name).map(|t| t.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str =
        "theorem_id,status,slack,lhs,rhs,residual_abs,residual_rel,terms";

    /// One flat row; terms are packed as `name=value:err` joined by `;`.
    pub fn csv_row(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|(k, t)| format!("{k}={:e}:{:e}", t.value, t.err))
            .collect();
        let slack = self.slack().map(|s| format!("{s:e}")).unwrap_or_default();
        format!(
            "{},{},{},{:e},{:e},{:e},{:e},\"{}\"",
            self.theorem_id,
            self.status.label(),
            slack,
            self.lhs,
            self.rhs,
            self.residual_abs,
            self.residual_rel,
            terms.join(";")
        )
    }
}

/// Accumulates signed term contributions and closes them into a report.
pub(crate) struct Builder {
    id: String,
    params: serde_json::Value,
    terms: IndexMap<String, Term>,
    diagnostics: Vec<String>,
    unconverged: Vec<String>,
    tol_scale: f64,
}

impl Builder {
    pub fn new(id: &str, params: &impl Serialize, tol_scale: f64) -> Self {
        Builder {
            id: id.to_string(),
            params: serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
            terms: IndexMap::new(),
            diagnostics: Vec::new(),
            unconverged: Vec::new(),
            tol_scale,
        }
    }

    /// Stores `coef * q` under `name` and returns the contribution.
    pub fn put(&mut self, name: &str, coef: f64, q: QuadResult) -> f64 {
        if !q.converged {
            self.unconverged.push(name.to_string());
        }
        if coef == 0.0 {
            self.put_value(name, 0.0, 0.0);
            return 0.0;
        }
        self.put_value(name, coef * q.value, coef.abs() * q.err_est)
    }

    pub fn put_value(&mut self, name: &str, value: f64, err: f64) -> f64 {
        self.terms.insert(name.to_string(), Term { value, err });
        value
    }

    pub fn get(&self, name: &str) -> f64 {
        self.terms.get(name).map_or(0.0, |t| t.value)
    }

    pub fn err(&self, name: &str) -> f64 {
        self.terms.get(name).map_or(0.0, |t| t.err)
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.diagnostics.push(msg.into());
    }

    fn sum(&self, names: &[&str]) -> (f64, f64, f64) {
        names.iter().fold((0.0, 0.0, 0.0), |(v, e, m), n| {
            let t = self.terms.get(*n).copied().unwrap_or(Term { value: 0.0, err: 0.0 });
            (v + t.value, e + t.err, m + t.value.abs())
        })
    }

    fn finish(mut self, lhs: f64, rhs: f64, residual_abs: f64, status: Status) -> VerificationReport {
        if !self.unconverged.is_empty() {
            self.diagnostics
                .push(format!("quadrature did not converge for: {}", self.unconverged.join(", ")));
        }
        let denom = lhs.abs().max(rhs.abs()).max(TINY);
        VerificationReport {
            theorem_id: self.id,
            params: self.params,
            terms: self.terms,
            lhs,
            rhs,
            residual_abs,
            residual_rel: residual_abs / denom,
            status,
            diagnostics: self.diagnostics,
        }
    }

    /// `sum(lhs) = sum(rhs)` within `tol` relative and within the error budget.
    pub fn identity(self, lhs: &[&str], rhs: &[&str], tol: f64) -> VerificationReport {
        let (l, le, lm) = self.sum(lhs);
        let (r, re, rm) = self.sum(rhs);
        let residual = (l - r).abs();
        let budget = SAFETY * (le + re) + ROUNDOFF * (lm + rm);
        let rel = residual / l.abs().max(r.abs()).max(TINY);
        let tol = tol * self.tol_scale;
        let status = if !residual.is_finite() {
            Status::Fail {
                diagnostic: "non-finite residual".into(),
            }
        } else if rel > tol {
            Status::Fail {
                diagnostic: format!("relative residual {rel:e} exceeds {tol:e}"),
            }
        } else if residual > budget * self.tol_scale {
            Status::Fail {
                diagnostic: format!("residual {residual:e} exceeds error budget {budget:e}"),
            }
        } else {
            Status::IdentityPass
        };
        self.finish(l, r, residual, status)
    }

    /// `sum(small) <= sum(big)` up to the error budget; slack is `big - small`.
    pub fn inequality(self, small: &[&str], big: &[&str]) -> VerificationReport {
        let (l, le, lm) = self.sum(small);
        let (r, re, rm) = self.sum(big);
        self.inequality_values(l, r, le + re, lm + rm)
    }

    fn budget(&self, l: f64, r: f64, err: f64, mass: f64) -> f64 {
        (SAFETY * err + ROUNDOFF * mass + INEQ_FLOOR * l.abs().max(r.abs())) * self.tol_scale
    }

    /// Slack of `sum(small) <= sum(big)` and whether it is within budget, without closing.
    pub fn link(&self, small: &[&str], big: &[&str]) -> (f64, bool) {
        let (l, le, lm) = self.sum(small);
        let (r, re, rm) = self.sum(big);
        let slack = r - l;
        (slack, slack.is_finite() && slack >= -self.budget(l, r, le + re, lm + rm))
    }

    /// Whether `sum(lhs) = sum(rhs)` within `tol` relative and the error budget, without closing.
    pub fn matches(&self, lhs: &[&str], rhs: &[&str], tol: f64) -> (f64, bool) {
        let (l, le, lm) = self.sum(lhs);
        let (r, re, rm) = self.sum(rhs);
        let residual = (l - r).abs();
        let rel = residual / l.abs().max(r.abs()).max(TINY);
        let budget = SAFETY * (le + re) + ROUNDOFF * (lm + rm);
        (rel, rel <= tol * self.tol_scale && residual <= budget * self.tol_scale)
    }

    /// Inequality on precomputed sides with their combined error and term mass.
    pub fn inequality_values(self, l: f64, r: f64, err: f64, mass: f64) -> VerificationReport {
        let slack = r - l;
        let budget = self.budget(l, r, err, mass);
        let status = if !slack.is_finite() {
            Status::Fail {
                diagnostic: "non-finite slack".into(),
            }
        } else if slack < -budget {
            Status::Fail {
                diagnostic: format!("slack {slack:e} below error budget -{budget:e}"),
            }
        } else {
            Status::InequalityPass { slack }
        };
        let residual = (-slack).max(0.0);
        self.finish(l, r, residual, status)
    }

    /// Closes as the inequality `sum(small) <= sum(big)` unless an auxiliary
    /// check recorded in `failures` already failed.
    pub fn inequality_unless(mut self, small: &[&str], big: &[&str], failures: Vec<String>) -> VerificationReport {
        if failures.is_empty() {
            return self.inequality(small, big);
        }
        let (l, _, _) = self.sum(small);
        let (r, _, _) = self.sum(big);
        let diagnostic = failures.join("; ");
        self.diagnostics.push(diagnostic.clone());
        self.with_status(l, r, Status::Fail { diagnostic })
    }

    /// Closes with an explicit status.
    pub fn with_status(self, lhs: f64, rhs: f64, status: Status) -> VerificationReport {
        let residual = (rhs - lhs).abs();
        self.finish(lhs, rhs, residual, status)
    }
}

/// Maps integration failures to a report status; parameter errors propagate.
pub(crate) fn inadmissible_or(
    id: &str,
    params: &impl Serialize,
    outcome: Result<VerificationReport>,
) -> Result<VerificationReport> {
    match outcome {
        Err(Error::Inadmissible(reason)) => {
            let b = Builder::new(id, params, 1.0);
            let status = Status::Inadmissible {
                reason: reason.to_string(),
            };
            Ok(b.with_status(f64::NAN, f64::NAN, status))
        }
        other => other,
    }
}
