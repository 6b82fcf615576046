//! Text and CSV rendering of verification reports.

use std::fmt::Write as _;

use aniso_core::verify::{fmt_num, Instance, VerificationReport};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

fn short(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

fn params_cell(i: &Instance) -> String {
    if i.params.is_empty() {
        return "-".into();
    }
    i.params.iter().map(|(k, v)| format!("{k}={}", short(*v))).collect::<Vec<_>>().join(";")
}

fn drift_cell(i: &Instance) -> String {
    i.drift.map_or_else(|| "-".into(), fmt_num)
}

pub fn summary_line(r: &VerificationReport) -> String {
    format!(
        "{} worst_ratio={} drift={}",
        r.verdict.as_str().to_uppercase(),
        fmt_num(r.worst_ratio),
        fmt_num(r.refinement_drift)
    )
}

/// Reports contained in a JSON document: a single report or a battery.
pub fn reports_of(v: &Value) -> Result<Vec<VerificationReport>, CliError> {
    let data = |e: aniso_core::Error| CliError::Data(e.to_string());
    match v.get("reports") {
        Some(Value::Array(items)) => items.iter().map(|r| VerificationReport::from_json(r).map_err(data)).collect(),
        Some(_) => Err(CliError::Data("\"reports\" must be an array".into())),
        None => Ok(vec![VerificationReport::from_json(v).map_err(data)?]),
    }
}

/// One block per report; at most `max_rows` instance rows when given.
pub fn render_text(r: &VerificationReport, max_rows: Option<usize>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "== {} ==", r.suite);
    let _ = writeln!(out, "{}", summary_line(r));
    let t = &r.tolerances;
    let _ = writeln!(
        out,
        "tolerances: lower={} threshold={} drift_tol={}",
        fmt_num(t.lower),
        fmt_num(t.threshold),
        fmt_num(t.drift_tol)
    );
    let header = ["params", "lhs", "rhs", "ratio", "drift"].map(String::from);
    let shown = max_rows.unwrap_or(r.instances.len()).min(r.instances.len());
    let rows: Vec<[String; 5]> = r.instances[..shown]
        .iter()
        .map(|i| [params_cell(i), fmt_num(i.lhs), fmt_num(i.rhs), fmt_num(i.ratio), drift_cell(i)])
        .collect();
    let mut width = header.clone().map(|h| h.len());
    for row in &rows {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    for row in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    if shown < r.instances.len() {
        let _ = writeln!(out, "... {} more rows", r.instances.len() - shown);
    }
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    for (k, v) in &r.meta {
        let _ = writeln!(out, "meta: {k}={v}");
    }
    out
}

pub fn render_csv(r: &VerificationReport) -> String {
    let mut out = String::from("suite,params,lhs,rhs,ratio,drift\n");
    for i in &r.instances {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.suite,
            params_cell(i),
            fmt_num(i.lhs),
            fmt_num(i.rhs),
            fmt_num(i.ratio),
            drift_cell(i)
        );
    }
    out
}

pub fn render_report(v: &Value, format: Format, max_rows: Option<usize>) -> Result<String, CliError> {
    let reports = reports_of(v)?;
    Ok(match format {
        Format::Text => reports.iter().map(|r| render_text(r, max_rows)).collect::<Vec<_>>().join("\n"),
        Format::Csv => reports.iter().map(render_csv).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use aniso_core::verify::Tolerances;

    #[test]
    fn empty_report_is_header_only() {
        let r = VerificationReport::assemble("empty", vec![], Tolerances::upper(1.0, 0.1));
        let text = render_text(&r, None);
        assert!(text.contains("PASS worst_ratio="));
        let table: Vec<&str> = text.lines().filter(|l| l.starts_with("params")).collect();
        assert_eq!(table.len(), 1);
        assert_eq!(render_csv(&r), "suite,params,lhs,rhs,ratio,drift\n");
    }

    #[test]
    fn rows_are_truncated() {
        let inst = (0..5).map(|i| Instance::new(i as f64, 1.0, 8).param("member", i as f64)).collect();
        let r = VerificationReport::assemble("s", inst, Tolerances::upper(10.0, 0.1));
        assert!(render_text(&r, Some(2)).contains("... 3 more rows"));
    }
}
