//! Deterministic CSV and summary emission for completed runs.
//!
//! Identical inputs produce byte-identical files: floats print through
//! Rust's shortest round-trip formatting, rows follow fixed iteration
//! order, and lines end with `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::metrics::{RegretReport, VerdictStatus};

/// `trace.csv` column header, in the exact emitted order.
pub const TRACE_HEADER: &str = "t,i,phi_t_xt,phi_t_opt,gap,reg_cum,v_t,w_t,sigma_t,sigma_surrogate";

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Render the per-step trace as CSV: one row per `(t, i)`, `1 + T*N` lines.
pub fn render_trace_csv(report: &RegretReport) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    let surrogate = if report.sigma_surrogate { 1 } else { 0 };
    for row in &report.rows {
        let t_idx = row.t - 1;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.t,
            row.i,
            fmt_f64(row.phi_xt),
            fmt_f64(row.phi_opt),
            fmt_f64(row.gap),
            fmt_f64(row.reg_cum),
            fmt_f64(report.v[t_idx]),
            fmt_f64(report.w[t_idx]),
            fmt_f64(report.sigma[t_idx]),
            surrogate,
        );
    }
    out
}

fn verdict_word(status: VerdictStatus) -> &'static str {
    match status {
        VerdictStatus::Satisfied => "true",
        VerdictStatus::Violated => "false",
        VerdictStatus::Skipped => "skipped",
    }
}

/// Render the summary: one line per implemented bound, then the run-level
/// constants.
pub fn render_summary(report: &RegretReport) -> String {
    let mut out = String::new();
    for b in &report.bounds {
        let _ = writeln!(
            out,
            "{} lhs={} rhs={} satisfied={} slack={}",
            b.name,
            fmt_f64(b.verdict.lhs),
            fmt_f64(b.verdict.rhs),
            verdict_word(b.verdict.status),
            fmt_f64(b.verdict.slack),
        );
    }
    let _ = writeln!(out, "e={}", fmt_f64(report.drift));
    let _ = writeln!(out, "alpha_min={}", fmt_f64(report.alpha_min));
    let _ = writeln!(out, "L={}", fmt_f64(report.max_lipschitz));
    let _ = writeln!(
        out,
        "sigma_surrogate={}",
        if report.sigma_surrogate { 1 } else { 0 }
    );
    out
}

/// Write `trace.csv` and `summary.txt` into `dest`, creating it if needed.
/// Returns the two paths.
pub fn emit_report(report: &RegretReport, dest: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dest)?;
    let trace_path = dest.join("trace.csv");
    let summary_path = dest.join("summary.txt");
    fs::write(&trace_path, render_trace_csv(report))?;
    fs::write(&summary_path, render_summary(report))?;
    Ok((trace_path, summary_path))
}
