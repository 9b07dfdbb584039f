//! Signed deficits of inequalities and identities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Pass/fail tolerances, both relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|relative deficit|` allowed where equality is expected.
    pub equality: f64,
    /// Negative relative deficit tolerated before an inequality counts as violated.
    pub inequality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: 1e-8,
            inequality: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The deficit is below `-tol`: a genuine counterexample or a bug.
    InequalityViolated,
    /// Equality was expected but the deficit is not within tolerance.
    EqualityMissed,
    /// A hypothesis of the statement fails; the numbers are reported anyway.
    HypothesisViolated,
    /// The check could not be evaluated.
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::InequalityViolated => "inequality-violated",
            Status::EqualityMissed => "equality-missed",
            Status::HypothesisViolated => "hypothesis-violated",
            Status::Error => "error",
        })
    }
}

/// A swept parameter attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub parameter: String,
    pub value: f64,
}

/// One evaluated inequality `lhs >= rhs` (or identity `lhs = rhs`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub deficit: f64,
    /// `deficit / max(|lhs|, |rhs|)`, zero when both sides vanish.
    pub rel_deficit: f64,
    pub status: Status,
    pub pass: bool,
    pub equality_expected: bool,
    /// Change in the deficit when the quadrature is refined, if computed.
    pub error_estimate: Option<f64>,
    /// Hypothesis certificates that were checked and what they found.
    pub hypotheses: Vec<String>,
    pub notes: Vec<String>,
    pub sweep: Option<SweepPoint>,
}

impl DeficitReport {
    pub fn new(case: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let deficit = lhs - rhs;
        let scale = lhs.abs().max(rhs.abs());
        let rel_deficit = if scale == 0.0 { 0.0 } else { deficit / scale };
        Self {
            case: case.into(),
            lhs,
            rhs,
            deficit,
            rel_deficit,
            status: Status::Ok,
            pass: true,
            equality_expected: false,
            error_estimate: None,
            hypotheses: Vec::new(),
            notes: Vec::new(),
            sweep: None,
        }
    }

    /// A report for a check that could not be evaluated.
    pub fn failure(case: impl Into<String>, err: &Error) -> Self {
        let mut r = Self::new(case, f64::NAN, f64::NAN);
        r.rel_deficit = f64::NAN;
        r.status = Status::Error;
        r.pass = false;
        r.notes.push(err.to_string());
        r
    }

    /// Judges `lhs >= rhs`: pass iff `rel_deficit >= -tol.inequality`, and
    /// additionally `|rel_deficit| < tol_equality` when equality is expected.
    pub fn judge_inequality(
        mut self,
        equality_expected: bool,
        tol: &Tolerances,
        tol_equality: f64,
    ) -> Self {
        self.equality_expected = equality_expected;
        let sound = self.rel_deficit >= -tol.inequality;
        let sharp = !equality_expected || self.rel_deficit.abs() < tol_equality;
        self.pass = sound && sharp;
        self.status = if !sound {
            Status::InequalityViolated
        } else if !sharp {
            Status::EqualityMissed
        } else {
            Status::Ok
        };
        self
    }

    /// Judges an identity `lhs = rhs`: pass iff `|rel_deficit| < tol`.
    pub fn judge_identity(mut self, tol: f64) -> Self {
        self.equality_expected = true;
        self.pass = self.rel_deficit.abs() < tol;
        self.status = if self.pass {
            Status::Ok
        } else {
            Status::EqualityMissed
        };
        self
    }

    /// Records a hypothesis that was checked and holds.
    pub fn hypothesis(mut self, note: impl Into<String>) -> Self {
        self.hypotheses.push(note.into());
        self
    }

    /// Marks a failed hypothesis; `pass` keeps the numerical verdict.
    pub fn hypothesis_violated(mut self, note: impl Into<String>) -> Self {
        if self.status != Status::Error {
            self.status = Status::HypothesisViolated;
        }
        self.hypotheses.push(note.into());
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}
