//! Machine-readable reports and their text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::problem::MatrixJson;

/// Dimension of one computed space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimEntry {
    pub name: String,
    /// `real` or `complex`.
    pub field: String,
    pub dim: usize,
    pub real_dim: usize,
}

/// Pass/fail with the residual that decided it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub residual: f64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Verdict {
    /// `pass = residual <= threshold`; non-finite residuals fail and are
    /// stored as `f64::MAX` so the report stays valid JSON.
    pub fn bound(check: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let pass = residual.is_finite() && residual <= threshold;
        Self {
            check: check.into(),
            pass,
            residual: if residual.is_finite() { residual } else { f64::MAX },
            threshold,
            detail: String::new(),
        }
    }

    /// A boolean outcome; `residual` is reported alongside.
    pub fn flag(check: impl Into<String>, pass: bool, residual: f64, threshold: f64) -> Self {
        Self {
            pass,
            ..Self::bound(check, residual, threshold)
        }
    }

    pub fn failed(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            pass: false,
            residual: f64::MAX,
            threshold: 0.0,
            detail: detail.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<(String, MatrixJson)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scalars: Vec<(String, f64)>,
}

/// Everything that must be identical across runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub input: String,
    pub kind: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    pub tol: f64,
    pub dims: Vec<DimEntry>,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Body {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn dim(&self, name: &str) -> Option<&DimEntry> {
        self.dims.iter().find(|d| d.name == name)
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }
}

/// Wall-clock times in milliseconds, kept out of the comparable section.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ms: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub comparable: Body,
    pub timing: Timing,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.comparable.passed()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusBody {
    pub directory: String,
    pub files: usize,
    pub passed: usize,
    pub failed: usize,
    pub verdicts_passed: usize,
    pub verdicts_failed: usize,
    pub reports: Vec<Body>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub comparable: CorpusBody,
    pub timing: Timing,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.comparable.failed == 0
    }
}

fn fmt_num(x: f64) -> String {
    if x == f64::MAX {
        "inf".into()
    } else {
        format!("{x:.2e}")
    }
}

/// Aligned text table of one report body.
pub fn render_body(b: &Body) -> String {
    let mut out = String::new();
    let head = match &b.theorem {
        Some(t) => format!("{} [{}] {} --theorem {}", b.input, b.kind, b.command, t),
        None => format!("{} [{}] {}", b.input, b.kind, b.command),
    };
    let _ = writeln!(out, "{head}  (tol {:.1e})", b.tol);
    if let Some(e) = &b.error {
        let _ = writeln!(out, "  error: {e}");
    }
    if !b.dims.is_empty() {
        let w = b.dims.iter().map(|d| d.name.len()).max().unwrap_or(0);
        let _ = writeln!(out, "  {:<w$}  {:>7}  {:>4}  {:>8}", "space", "field", "dim", "real dim");
        for d in &b.dims {
            let _ = writeln!(out, "  {:<w$}  {:>7}  {:>4}  {:>8}", d.name, d.field, d.dim, d.real_dim);
        }
    }
    if !b.verdicts.is_empty() {
        let w = b.verdicts.iter().map(|v| v.check.len()).max().unwrap_or(0);
        let _ = writeln!(out, "  {:<w$}  {:>4}  {:>9}  {:>9}", "check", "ok", "residual", "threshold");
        for v in &b.verdicts {
            let _ = write!(
                out,
                "  {:<w$}  {:>4}  {:>9}  {:>9}",
                v.check,
                if v.pass { "pass" } else { "FAIL" },
                fmt_num(v.residual),
                fmt_num(v.threshold)
            );
            if !v.detail.is_empty() {
                let _ = write!(out, "  {}", v.detail);
            }
            out.push('\n');
        }
    }
    for n in &b.notes {
        let _ = writeln!(out, "  note: {n}");
    }
    out
}

pub fn render_corpus(c: &CorpusBody) -> String {
    let mut out = String::new();
    for b in &c.reports {
        out.push_str(&render_body(b));
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "{}: {} files, {} passed, {} failed ({} checks passed, {} failed)",
        c.directory, c.files, c.passed, c.failed, c.verdicts_passed, c.verdicts_failed
    );
    out
}
