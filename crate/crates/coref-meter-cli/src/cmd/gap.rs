use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde_json::{json, Value};

use coref_meter::disagg::{generalization_gap, DisaggReport, DEFAULT_GAP_THRESHOLD};

use crate::cmd::Format;
use crate::input;
use crate::report::{cell, deliver, md_footer, md_table, to_json_text, RunMeta};

#[derive(Args, Debug)]
pub struct GapArgs {
    /// In-domain disaggregated report (JSON from `disagg`).
    #[arg(long = "in", value_name = "FILE")]
    in_report: PathBuf,

    /// Out-of-domain disaggregated report.
    #[arg(long, value_name = "FILE")]
    out_domain: PathBuf,

    /// Highlight a type when |type gap - aggregate gap| exceeds this.
    #[arg(long, value_name = "F1", default_value_t = DEFAULT_GAP_THRESHOLD)]
    threshold: f64,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Report file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: GapArgs) -> Result<()> {
    let meta = RunMeta::new(
        "gap",
        json!({
            "in": args.in_report,
            "out_domain": args.out_domain,
            "threshold": args.threshold,
        }),
    );

    let in_domain = load_report(&args.in_report)?;
    let out_domain = load_report(&args.out_domain)?;
    let rep = generalization_gap(&in_domain, &out_domain, args.threshold);
    let wrapped = meta.wrap(serde_json::to_value(&rep)?);

    let text = match args.format {
        Format::Json => to_json_text(&wrapped),
        Format::Md => render_md(&wrapped),
    };
    deliver(args.out.as_deref(), &text)
}

fn load_report(path: &Path) -> Result<DisaggReport> {
    serde_json::from_str(&input::read(path)?)
        .with_context(|| format!("{} is not a disaggregated report", path.display()))
}

/// Markdown render of the gap report JSON.
pub fn render_md(r: &Value) -> String {
    let mut out = format!(
        "# Generalization gap: {} vs {}\n\nAggregate B3 F1 gap: {}\n\n",
        cell(&r["in_domain"]),
        cell(&r["out_domain"]),
        cell(&r["agg"]),
    );
    let highlighted: Vec<&str> =
        r["highlighted"].as_array().map(Vec::as_slice).unwrap_or_default().iter().filter_map(Value::as_str).collect();
    let mut rows = Vec::new();
    if let Some(tgg) = r["tgg"].as_object() {
        for (name, gap) in tgg {
            let mark = if highlighted.contains(&name.as_str()) { "yes" } else { "" };
            rows.push(vec![name.clone(), cell(gap), mark.to_string()]);
        }
    }
    out.push_str(&md_table(&["type", "f1 gap", "highlighted"], &rows));
    if let Some(inc) = r["incomparable"].as_array() {
        if !inc.is_empty() {
            let names: Vec<String> = inc.iter().map(cell).collect();
            out.push_str(&format!("\nPresent in only one report: {}\n", names.join(", ")));
        }
    }
    out.push_str(&format!("\nHighlight threshold: {}\n", cell(&r["threshold"])));
    out.push_str(&md_footer(r));
    out
}
