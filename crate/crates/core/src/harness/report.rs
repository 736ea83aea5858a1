//! Flat-file renderings of reports.
//!
//! Every CSV starts with a `# schema=1` line. Experiment reports use a long
//! format, one row per value:
//!
//! ```text
//! scope,trial,metric,value,std_error,lo,hi
//! ```
//!
//! `scope` is `trial` (per-trial rows, empty band columns) or `summary`
//! (empty trial column, `value` is the mean, `lo`/`hi` the 4-sigma band).

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::experiment::Report;
use super::verify::SuiteReport;
use crate::recurrence::{critical_c, lambda, period2_fixed_point, EnvelopeRow};

pub const SCHEMA_LINE: &str = "# schema=1";

fn num(x: f64) -> String {
    format!("{x}")
}

pub fn report_csv(report: &Report) -> String {
    let mut out = format!("{SCHEMA_LINE}\nscope,trial,metric,value,std_error,lo,hi\n");
    for t in &report.trials {
        for (name, v) in &t.metrics {
            let _ = writeln!(out, "trial,{},{name},{},,,", t.trial, num(*v));
        }
    }
    for s in &report.summary {
        let _ = writeln!(
            out,
            "summary,,{},{},{},{},{}",
            s.metric,
            num(s.mean),
            num(s.std_error),
            num(s.lo),
            num(s.hi)
        );
    }
    out
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize")
}

pub fn suite_csv(reports: &[SuiteReport]) -> String {
    let mut out = format!("{SCHEMA_LINE}\nsuite,check,passed,detail\n");
    for r in reports {
        for c in &r.checks {
            let _ = writeln!(out, "{},{},{},\"{}\"", r.suite, c.name, c.passed, c.detail.replace('"', "'"));
        }
    }
    out
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Envelope rows; bounds that do not apply at a level are left empty.
pub fn recurrence_csv(rows: &[EnvelopeRow]) -> String {
    let mut out = format!("{SCHEMA_LINE}\nlevel,eps_min,eps_max,two_step_bound,induction_bound\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.level,
            num(r.eps_min),
            num(r.eps_max),
            opt(r.two_step_bound),
            opt(r.induction_bound)
        );
    }
    out
}

/// The period-2 threshold at one sparsified degree and one `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub delta_prime: usize,
    pub critical_c: f64,
    pub c: f64,
    pub lambda: f64,
    pub period2_root: Option<f64>,
}

impl ThresholdRow {
    pub fn new(delta_prime: usize, c: f64) -> Self {
        let l = lambda(c, delta_prime);
        ThresholdRow {
            delta_prime,
            critical_c: critical_c(delta_prime),
            c,
            lambda: l,
            period2_root: period2_fixed_point(l),
        }
    }
}

pub fn threshold_csv(rows: &[ThresholdRow]) -> String {
    let mut out = format!("{SCHEMA_LINE}\ndelta_prime,critical_c,c,lambda,period2_root\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.delta_prime,
            num(r.critical_c),
            num(r.c),
            num(r.lambda),
            opt(r.period2_root)
        );
    }
    out
}
