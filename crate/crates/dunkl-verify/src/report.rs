//! Report rows: the single JSON-lines record type every check emits.
//!
//! All four row kinds share one pass rule so downstream tooling never has to
//! branch: a row passes if and only if `margin >= -quad_error`.
//!
//! * `margin` rows verify an inequality `lhs >= constant * rhs`; the margin is
//!   `lhs - constant * rhs`.
//! * `residual` rows verify a quantity is small; the margin is
//!   `threshold - residual` and `quad_error` is zero (the threshold already
//!   absorbs the numerical slack).
//! * `witness` rows record an empirical ratio where no sharp constant is
//!   asserted; the margin is the ratio itself, so passing means the ratio is
//!   positive up to quadrature error (and finite).
//! * `skip` rows record that a hypothesis gate failed; they pass by
//!   construction with a zero margin and carry the reason in `note`.

use serde::Serialize;

/// Discriminates how a row's `margin` was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Margin,
    Residual,
    Witness,
    Skip,
}

/// One verification result. Serialized as a single JSON object per line, with
/// fields in declaration order.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    /// Stable check identifier, e.g. `thm3.4` or `eq-crossterm`.
    pub theorem: String,
    /// Human-readable context descriptor (root system + multiplicities),
    /// optionally suffixed with the sub-case this row covers.
    pub ctx: String,
    pub kind: ReportKind,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub margin: f64,
    pub quad_error: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Report {
    /// Inequality row: asserts `lhs >= constant * rhs` up to quadrature error.
    pub fn margin(
        theorem: impl Into<String>,
        ctx: impl Into<String>,
        lhs: f64,
        rhs: f64,
        constant: f64,
        quad_error: f64,
    ) -> Self {
        let margin = lhs - constant * rhs;
        let ratio = if rhs != 0.0 { Some(lhs / rhs) } else { None };
        let pass = margin >= -quad_error;
        Report {
            theorem: theorem.into(),
            ctx: ctx.into(),
            kind: ReportKind::Margin,
            lhs,
            rhs,
            constant,
            ratio,
            margin,
            quad_error,
            pass,
            note: None,
        }
    }

    /// Smallness row: asserts `residual <= threshold`. The threshold is pinned
    /// by the caller, so `quad_error` is zero by convention.
    pub fn residual(
        theorem: impl Into<String>,
        ctx: impl Into<String>,
        residual: f64,
        threshold: f64,
    ) -> Self {
        let margin = threshold - residual;
        let pass = margin >= 0.0;
        Report {
            theorem: theorem.into(),
            ctx: ctx.into(),
            kind: ReportKind::Residual,
            lhs: residual,
            rhs: 0.0,
            constant: threshold,
            ratio: None,
            margin,
            quad_error: 0.0,
            pass,
            note: None,
        }
    }

    /// Empirical row: records `lhs / rhs` where no sharp constant is claimed.
    /// Passing means the ratio is finite and positive up to quadrature error.
    pub fn witness(
        theorem: impl Into<String>,
        ctx: impl Into<String>,
        lhs: f64,
        rhs: f64,
        quad_error: f64,
    ) -> Self {
        let ratio = lhs / rhs;
        let margin = ratio;
        let pass = ratio.is_finite() && margin >= -quad_error;
        Report {
            theorem: theorem.into(),
            ctx: ctx.into(),
            kind: ReportKind::Witness,
            lhs,
            rhs,
            constant: 0.0,
            ratio: Some(ratio),
            margin,
            quad_error,
            pass,
            note: None,
        }
    }

    /// Hypothesis-gate row: the check does not apply in this context and says
    /// why. Always passes with zero margin.
    pub fn skip(
        theorem: impl Into<String>,
        ctx: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        Report {
            theorem: theorem.into(),
            ctx: ctx.into(),
            kind: ReportKind::Skip,
            lhs: 0.0,
            rhs: 0.0,
            constant: 0.0,
            ratio: None,
            margin: 0.0,
            quad_error: 0.0,
            pass: true,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Serialize to one JSON line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Pass/fail/skip tallies over a batch of rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

pub fn summarize(reports: &[Report]) -> Summary {
    let mut s = Summary {
        total: reports.len(),
        passed: 0,
        failed: 0,
        skipped: 0,
    };
    for r in reports {
        if r.kind == ReportKind::Skip {
            s.skipped += 1;
        } else if r.pass {
            s.passed += 1;
        } else {
            s.failed += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_row_pass_rule() {
        let r = Report::margin("t", "c", 2.0, 1.0, 1.5, 1e-9);
        assert!(r.pass);
        assert!((r.margin - 0.5).abs() < 1e-15);
        assert_eq!(r.ratio, Some(2.0));

        let bad = Report::margin("t", "c", 1.0, 1.0, 1.5, 1e-9);
        assert!(!bad.pass);
        assert!(bad.margin < 0.0);
    }

    #[test]
    fn margin_row_tolerates_quadrature_slack() {
        let r = Report::margin("t", "c", 1.0, 1.0, 1.0 + 1e-12, 1e-9);
        assert!(r.pass, "tiny negative margin inside quad_error must pass");
    }

    #[test]
    fn residual_row_pass_rule() {
        assert!(Report::residual("t", "c", 1e-10, 1e-8).pass);
        assert!(!Report::residual("t", "c", 1e-6, 1e-8).pass);
        // Exact-zero residual against a zero threshold passes.
        assert!(Report::residual("t", "c", 0.0, 0.0).pass);
    }

    #[test]
    fn witness_row_requires_finite_positive_ratio() {
        assert!(Report::witness("t", "c", 3.0, 2.0, 0.0).pass);
        assert!(!Report::witness("t", "c", -1.0, 2.0, 0.0).pass);
        assert!(!Report::witness("t", "c", 1.0, 0.0, 0.0).pass);
        assert!(!Report::witness("t", "c", f64::NAN, 2.0, 0.0).pass);
    }

    #[test]
    fn skip_row_always_passes() {
        let r = Report::skip("t", "c", "hypothesis fails");
        assert!(r.pass);
        assert_eq!(r.kind, ReportKind::Skip);
        assert_eq!(r.note.as_deref(), Some("hypothesis fails"));
    }

    #[test]
    fn uniform_invariant_holds_for_all_kinds() {
        let rows = vec![
            Report::margin("a", "c", 2.0, 1.0, 1.0, 1e-9),
            Report::residual("b", "c", 1e-10, 1e-8),
            Report::witness("d", "c", 3.0, 2.0, 1e-9),
            Report::skip("e", "c", "n/a"),
        ];
        for r in &rows {
            assert_eq!(r.pass, r.margin >= -r.quad_error, "row {:?}", r.theorem);
        }
    }

    #[test]
    fn json_line_shape() {
        let line = Report::margin("thm3.4", "Z2^1 k=[3/2]", 2.0, 1.0, 1.0, 1e-9).to_json_line();
        assert!(line.starts_with("{\"theorem\":\"thm3.4\""));
        assert!(line.contains("\"kind\":\"margin\""));
        assert!(line.contains("\"pass\":true"));
        assert!(!line.contains("note"), "absent note must be omitted");
        let skip = Report::skip("x", "c", "why").to_json_line();
        assert!(skip.contains("\"note\":\"why\""));
        assert!(!skip.contains("ratio"), "absent ratio must be omitted");
    }

    #[test]
    fn summary_counts() {
        let rows = vec![
            Report::margin("a", "c", 2.0, 1.0, 1.0, 0.0),
            Report::margin("a", "c", 0.0, 1.0, 1.0, 0.0),
            Report::skip("b", "c", "n/a"),
        ];
        let s = summarize(&rows);
        assert_eq!(
            s,
            Summary {
                total: 3,
                passed: 1,
                failed: 1,
                skipped: 1
            }
        );
    }
}
