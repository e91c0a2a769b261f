//! Text and line-delimited JSON output.

use std::io::{self, Write};

use crq_core::catalog::Status;
use serde::{Deserialize, Serialize};

use crate::suite::{Item, Outcome, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

/// The configuration a run actually used, echoed at the top of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub suite: Suite,
    pub identity: Option<String>,
    pub model: String,
    pub sigma: Option<String>,
    pub u: Option<String>,
    pub degree: usize,
    pub form_degree: usize,
    pub fail_fast: bool,
}

#[derive(Serialize)]
struct Record<'a> {
    id: &'a str,
    anchor: &'a str,
    suite: &'a str,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_value: Option<&'a str>,
    /// Milliseconds; the only field that varies between identical runs.
    duration: f64,
}

fn record<'a>(item: &'a Item, o: &'a Outcome) -> Record<'a> {
    let (status, residual, exact_value, duration) = match o {
        Outcome::Report(r) => (
            match r.status {
                Status::Verified => "verified",
                Status::Failed => "failed",
            },
            r.residual.as_deref(),
            r.exact_value.as_deref(),
            (r.duration_ms * 1e3).round() / 1e3,
        ),
        Outcome::Skipped(why) => ("skipped", Some(why.as_str()), None, 0.0),
        Outcome::Error(e) => ("error", Some(e.as_str()), None, 0.0),
    };
    Record {
        id: item.id(),
        anchor: item.anchor(),
        suite: item.suite().name(),
        status,
        residual,
        exact_value,
        duration,
    }
}

pub fn write(out: &mut impl Write, format: Format, cfg: &Resolved, items: &[Item], outcomes: &[Outcome]) -> io::Result<()> {
    match format {
        Format::Json => {
            writeln!(out, "{}", serde_json::json!({ "config": cfg }))?;
            for (i, o) in items.iter().zip(outcomes) {
                writeln!(out, "{}", serde_json::to_string(&record(i, o)).expect("records serialize"))?;
            }
        }
        Format::Text => {
            writeln!(out, "config: {}", serde_json::to_string(cfg).expect("config serializes"))?;
            let (mut ok, mut bad, mut skipped) = (0, 0, 0);
            for (i, o) in items.iter().zip(outcomes) {
                let r = record(i, o);
                let tag = match r.status {
                    "verified" => {
                        ok += 1;
                        "PASS"
                    }
                    "skipped" => {
                        skipped += 1;
                        "SKIP"
                    }
                    _ => {
                        bad += 1;
                        "FAIL"
                    }
                };
                writeln!(out, "{} {} [{}] ({:.1} ms)", tag, r.id, r.suite, r.duration)?;
                writeln!(out, "    anchor: {}", r.anchor)?;
                if let Some(v) = r.exact_value {
                    writeln!(out, "    value: {}", v)?;
                }
                if let Some(v) = r.residual {
                    writeln!(out, "    residual: {}", v)?;
                }
            }
            let unrun = items.len() - outcomes.len();
            write!(out, "summary: {} verified, {} failed, {} skipped", ok, bad, skipped)?;
            if unrun > 0 {
                write!(out, ", {} not run", unrun)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn list(out: &mut impl Write, format: Format, items: &[Item]) -> io::Result<()> {
    for i in items {
        match format {
            Format::Json => writeln!(
                out,
                "{}",
                serde_json::json!({ "id": i.id(), "suite": i.suite().name(), "anchor": i.anchor() })
            )?,
            Format::Text => writeln!(out, "{:<36} {:<10} {}", i.id(), i.suite().name(), i.anchor())?,
        }
    }
    Ok(())
}
