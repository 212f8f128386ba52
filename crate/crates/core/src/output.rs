//! Writing run reports as JSON or as a flat CSV table.

use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::{report_json, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parameter(format!(
                "unknown format `{other}` (json or csv)"
            ))),
        }
    }
}

#[derive(Serialize)]
struct Row<'a> {
    table: &'a str,
    name: String,
    relation: String,
    measured: String,
    bound: Option<String>,
    margin: Option<String>,
    holds: Option<bool>,
    regime: String,
    flags: String,
}

fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

/// One row per lemma report, then one per color for witness counts and
/// lifted solution totals.
pub fn report_csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Numeric(format!("csv: {e}"));
    for r in &report.lemma_reports {
        w.serialize(Row {
            table: "lemma",
            name: r.lemma.clone(),
            relation: tag(&r.relation),
            measured: r.measured.to_string(),
            bound: Some(r.bound.to_string()),
            margin: Some(r.margin.to_string()),
            holds: Some(r.holds),
            regime: tag(&r.regime),
            flags: r.flags.join("; "),
        })
        .map_err(csv_err)?;
    }
    if let Some(s) = &report.witness_summary {
        for (i, &count) in s.per_color.iter().enumerate() {
            w.serialize(Row {
                table: "witnesses",
                name: format!("color-{}", i + 1),
                relation: String::new(),
                measured: count.to_string(),
                bound: None,
                margin: None,
                holds: None,
                regime: String::new(),
                flags: String::new(),
            })
            .map_err(csv_err)?;
        }
    }
    if let Some(l) = &report.lifting {
        for (name, v) in [
            ("ordered", l.ordered_solutions),
            ("unordered", l.unordered_solutions),
            ("degenerate", l.degenerate),
            ("failures", l.failures),
            ("search-ordered", l.cross_check.search_ordered),
        ] {
            w.serialize(Row {
                table: "lifting",
                name: name.to_string(),
                relation: String::new(),
                measured: v.to_string(),
                bound: None,
                margin: None,
                holds: None,
                regime: String::new(),
                flags: String::new(),
            })
            .map_err(csv_err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Numeric(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numeric(e.to_string()))
}

pub fn render(report: &RunReport, format: Format) -> Result<String> {
    match format {
        Format::Json => report_json(report),
        Format::Csv => report_csv(report),
    }
}

pub fn emit_report(report: &RunReport, format: Format, out: &mut impl Write) -> Result<()> {
    out.write_all(render(report, format)?.as_bytes())
        .map_err(|source| Error::Io {
            path: "<output>".into(),
            source,
        })
}
