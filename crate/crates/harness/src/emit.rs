use std::fmt::Write;

use crate::run::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

fn header(report: &Report) -> Vec<String> {
    let mut cols = vec!["config".to_string()];
    if let Some(row) = report.rows.first() {
        cols.extend(row.cells.iter().map(|c| format!("RE% {}", c.column)));
        if row.ratio.is_some() {
            cols.push("ratio".into());
        }
    }
    cols
}

fn values(report: &Report) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|row| {
            let mut v = vec![row.config.clone()];
            v.extend(row.cells.iter().map(|c| format!("{:.1}", c.re_percent())));
            if let Some(r) = row.ratio {
                v.push(format!("{r:.1}"));
            }
            v
        })
        .collect()
}

/// Relative errors in percent, one decimal place.
pub fn emit(report: &Report, format: Format) -> String {
    let head = header(report);
    let body = values(report);
    let mut out = String::new();
    match format {
        Format::Csv => {
            writeln!(out, "{}", head.join(",")).unwrap();
            for row in body {
                writeln!(out, "{}", row.join(",")).unwrap();
            }
        }
        Format::Markdown => {
            if !report.title.is_empty() {
                writeln!(out, "### {}\n", report.title).unwrap();
            }
            writeln!(out, "| {} |", head.join(" | ")).unwrap();
            writeln!(out, "|{}", "---|".repeat(head.len())).unwrap();
            for row in body {
                writeln!(out, "| {} |", row.join(" | ")).unwrap();
            }
        }
    }
    out
}
