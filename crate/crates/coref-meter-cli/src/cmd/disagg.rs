use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::Args;
use serde::Deserialize;
use serde_json::{json, Value};

use coref_meter::corpus::{Mention, PartitionSide};
use coref_meter::disagg::{disagg_report, DisaggDoc, TypeMap};
use coref_meter::metrics::ScoreOptions;
use coref_meter::typing::CoreferenceType;

use crate::cmd::{AggregationArg, Format};
use crate::input;
use crate::report::{cell, deliver, md_footer, md_table, strip_meta_lines, to_json_text, RunMeta};

#[derive(Args, Debug)]
pub struct DisaggArgs {
    /// Gold annotations (.conll, or .jsonl documents).
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,

    /// System annotations.
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,

    /// Mention-type annotations from `classify` (repeatable; unioned).
    #[arg(long, value_name = "FILE", required = true)]
    types: Vec<PathBuf>,

    /// Name recorded in the report (default: gold file stem).
    #[arg(long, value_name = "NAME")]
    dataset_id: Option<String>,

    /// Keep single-mention entities instead of dropping them on both sides.
    #[arg(long)]
    keep_singletons: bool,

    #[arg(long, value_enum, default_value_t = AggregationArg::Micro)]
    aggregation: AggregationArg,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Report file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: DisaggArgs) -> Result<()> {
    let dataset_id = args.dataset_id.clone().unwrap_or_else(|| file_stem(&args.gold));
    let meta = RunMeta::new(
        "disagg",
        json!({
            "gold": args.gold,
            "pred": args.pred,
            "types": args.types,
            "dataset_id": dataset_id,
            "keep_singletons": args.keep_singletons,
            "aggregation": format!("{:?}", args.aggregation).to_lowercase(),
        }),
    );

    let gold = input::load_documents(&args.gold, PartitionSide::Gold)?;
    let pred = input::load_documents(&args.pred, PartitionSide::Predicted)?;
    let pairs = input::pair_documents(gold, pred)?;

    let mut types_by_doc: BTreeMap<String, TypeMap> = BTreeMap::new();
    for path in &args.types {
        load_types(path, &mut types_by_doc)?;
    }

    let docs: Vec<DisaggDoc> = pairs
        .into_iter()
        .map(|(doc_id, g, p)| {
            let map = types_by_doc.remove(&doc_id).unwrap_or_default();
            DisaggDoc { gold: g, pred: p, gold_types: map.clone(), pred_types: map }
        })
        .collect();

    let options = ScoreOptions {
        keep_singletons: args.keep_singletons,
        aggregation: args.aggregation.into(),
    };
    let rep = disagg_report(&dataset_id, &docs, &options);
    let wrapped = meta.wrap(serde_json::to_value(&rep)?);

    let text = match args.format {
        Format::Json => to_json_text(&wrapped),
        Format::Md => render_md(&wrapped),
    };
    deliver(args.out.as_deref(), &text)
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into())
}

/// One mention-type record as `classify` writes them; extra fields such
/// as evidence are ignored here.
#[derive(Deserialize)]
struct TypeRow {
    doc_id: String,
    start: usize,
    end: usize,
    #[serde(default)]
    types: Vec<String>,
}

fn load_types(path: &Path, out: &mut BTreeMap<String, TypeMap>) -> Result<()> {
    let text = strip_meta_lines(&input::read(path)?);
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: TypeRow = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad type record", path.display(), i + 1))?;
        let mention = Mention::new(row.start, row.end);
        let entry = out.entry(row.doc_id).or_default().entry(mention).or_default();
        for name in &row.types {
            let t = CoreferenceType::from_name(name).ok_or_else(|| {
                anyhow!(
                    "{}:{}: unknown type {:?} (expected one of nested, on_generic, compound, copular)",
                    path.display(),
                    i + 1,
                    name
                )
            })?;
            entry.insert(t);
        }
    }
    Ok(())
}

/// Markdown render of the disaggregation report JSON.
pub fn render_md(r: &Value) -> String {
    let mut out = format!("# Disaggregated B3: {}\n\n## Overall\n\n", cell(&r["dataset_id"]));
    let mut rows = Vec::new();
    for metric in ["muc", "b3", "ceaf_e"] {
        let m = &r["overall"][metric];
        rows.push(vec![
            metric.to_string(),
            cell(&m["recall"]),
            cell(&m["precision"]),
            cell(&m["f1"]),
        ]);
    }
    out.push_str(&md_table(&["metric", "recall", "precision", "f1"], &rows));
    out.push_str(&format!("\nCoNLL F1: {}\n\n## Per type\n\n", cell(&r["overall"]["conll_f1"])));

    let mut rows = Vec::new();
    if let Some(per_type) = r["per_type"].as_object() {
        for (name, t) in per_type {
            rows.push(vec![
                name.clone(),
                cell(&t["score"]["recall"]),
                cell(&t["score"]["precision"]),
                cell(&t["score"]["f1"]),
                cell(&t["gold_mentions"]),
                cell(&t["pred_mentions"]),
            ]);
        }
    }
    out.push_str(&md_table(
        &["type", "recall", "precision", "f1", "gold mentions", "system mentions"],
        &rows,
    ));
    out.push_str(&md_footer(r));
    out
}
