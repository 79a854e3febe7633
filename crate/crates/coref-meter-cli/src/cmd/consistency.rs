use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use coref_meter::consistency::{
    concept_max, concept_max_transform, consistency_report, pooled_consistency, MaxMode,
};
use coref_meter::corpus::{parse_score_grids, HierarchyOptions};

use crate::cmd::Format;
use crate::input;
use crate::report::{cell, deliver, md_footer, md_table, to_json_text, RunMeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformArg {
    /// Replace each cell with the max over its ancestor sub-grid.
    Hard,
    /// Replace each cell with the log-sum-exp over its ancestor sub-grid.
    Soft,
}

#[derive(Args, Debug)]
pub struct ConsistencyArgs {
    /// Score grids, one JSON object per line ({"event", "subject_chain",
    /// "object_chain", "scores"}).
    #[arg(long, value_name = "FILE")]
    grids: PathBuf,

    /// Concept hierarchy edges, child<TAB>parent; when given, every chain
    /// must run general to specific along it.
    #[arg(long, value_name = "FILE")]
    hierarchy: Option<PathBuf>,

    /// Hierarchy root concept (default: the unique parentless concept).
    #[arg(long, value_name = "CONCEPT")]
    root: Option<String>,

    /// Drop hierarchy concepts above this depth (root = depth 0).
    #[arg(long, value_name = "N")]
    min_depth: Option<usize>,

    /// Rescore each grid over ancestor sub-grids before measuring.
    #[arg(long, value_enum)]
    transform: Option<TransformArg>,

    /// Render as json or md.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    report: Format,

    /// Report file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: ConsistencyArgs) -> Result<()> {
    let meta = RunMeta::new(
        "consistency",
        json!({
            "grids": args.grids,
            "hierarchy": args.hierarchy,
            "root": args.root,
            "min_depth": args.min_depth,
            "transform": args.transform.map(|t| format!("{t:?}").to_lowercase()),
        }),
    );

    let hierarchy = match &args.hierarchy {
        Some(path) => {
            let options = HierarchyOptions {
                root: args.root.clone(),
                min_depth: args.min_depth.unwrap_or(1),
            };
            let (h, warnings) = coref_meter::corpus::parse_hierarchy(path, None, &options)?;
            input::print_warnings(&warnings);
            Some(h)
        }
        None => None,
    };

    let mut grids = parse_score_grids(&args.grids, hierarchy.as_ref())?;
    if let Some(t) = args.transform {
        let mode = match t {
            TransformArg::Hard => MaxMode::Hard,
            TransformArg::Soft => MaxMode::Soft,
        };
        grids = grids.iter().map(|g| concept_max_transform(g, mode)).collect();
    }

    let per_grid: Vec<Value> = grids
        .par_iter()
        .map(|grid| {
            let rep = consistency_report(grid);
            json!({
                "event": grid.event,
                "rows": grid.rows(),
                "cols": grid.cols(),
                "pooled": rep.pooled,
                "subject_axis": rep.subject_axis,
                "object_axis": rep.object_axis,
                "concept_max_hard": concept_max(grid, MaxMode::Hard),
                "concept_max_soft": concept_max(grid, MaxMode::Soft),
            })
        })
        .collect();
    let pooled = pooled_consistency(&grids);

    let wrapped = meta.wrap(json!({
        "transform": args.transform.map(|t| format!("{t:?}").to_lowercase()),
        "grids": per_grid,
        "pooled": pooled,
    }));
    let text = match args.report {
        Format::Json => to_json_text(&wrapped),
        Format::Md => render_md(&wrapped),
    };
    deliver(args.out.as_deref(), &text)
}

/// Markdown render of the consistency report JSON.
pub fn render_md(r: &Value) -> String {
    let mut out = String::from("# Abstraction consistency\n\n");
    if let Some(t) = r["transform"].as_str() {
        out.push_str(&format!("Grids rescored with the {t} concept-max transform.\n\n"));
    }
    let mut rows = Vec::new();
    if let Some(grids) = r["grids"].as_array() {
        for g in grids {
            rows.push(vec![
                cell(&g["event"]),
                format!("{}x{}", cell(&g["rows"]), cell(&g["cols"])),
                cell(&g["pooled"]["ccd"]),
                cell(&g["pooled"]["ler"]),
                cell(&g["pooled"]["windows"]),
                cell(&g["concept_max_hard"]),
                cell(&g["concept_max_soft"]),
            ]);
        }
    }
    out.push_str(&md_table(
        &["event", "grid", "ccd", "ler", "windows", "max (hard)", "max (soft)"],
        &rows,
    ));
    let pooled = &r["pooled"];
    out.push_str(&format!(
        "\nPooled over {} windows: CCD {} · LER {} (subject axis {} / {}, object axis {} / {})\n",
        cell(&pooled["pooled"]["windows"]),
        cell(&pooled["pooled"]["ccd"]),
        cell(&pooled["pooled"]["ler"]),
        cell(&pooled["subject_axis"]["ccd"]),
        cell(&pooled["subject_axis"]["ler"]),
        cell(&pooled["object_axis"]["ccd"]),
        cell(&pooled["object_axis"]["ler"]),
    ));
    out.push_str(&md_footer(r));
    out
}
