//! Report data model and rendering. The JSON form has a stable key set
//! (`directives[].{kind, notion, valid, witness, annotations, trace}` and
//! the top-level `engine_agreement`) and round-trips through serde; the
//! text form interleaves bracketed predicates with source in annotate
//! mode.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub directives: Vec<DirectiveReport>,
    pub engine_agreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectiveReport {
    pub kind: String,
    pub program: String,
    pub notion: Option<String>,
    pub valid: Option<bool>,
    /// Counterexample state as a variable-to-value object, when invalid.
    pub witness: Option<serde_json::Value>,
    pub annotations: Vec<AnnotationReport>,
    pub trace: Option<Vec<FixpointTraceReport>>,
    pub expect: Option<String>,
    pub expectation_met: Option<bool>,
    /// Kind-specific payload (set sizes, per-value verdicts, formulas).
    pub details: serde_json::Value,
    /// One-line text rendering.
    pub summary: String,
    /// Pre-rendered annotated source listing (annotate mode only).
    pub listing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationReport {
    pub label: String,
    pub depth: usize,
    pub formula: String,
    pub states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixpointTraceReport {
    pub transformer: String,
    pub polarity: String,
    pub loop_label: String,
    pub iterations: usize,
    pub sizes: Vec<usize>,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Render a report. Output is a pure function of the report value.
pub fn render_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
        ReportFormat::Text => {
            let mut out = String::new();
            for directive in &report.directives {
                let _ = writeln!(out, "{}", directive.summary);
                for line in &directive.listing {
                    let _ = writeln!(out, "  {line}");
                }
                if let Some(traces) = &directive.trace {
                    for t in traces {
                        let _ = writeln!(
                            out,
                            "  fixpoint {} ({}, {}): {} iterations, sizes {:?}{}",
                            t.loop_label,
                            t.transformer,
                            t.polarity,
                            t.iterations,
                            t.sizes,
                            if t.converged { "" } else { " [DID NOT CONVERGE]" }
                        );
                    }
                }
            }
            let _ = writeln!(
                out,
                "engine agreement: {}",
                if report.engine_agreement { "ok" } else { "DISAGREEMENT" }
            );
            out
        }
    }
}
