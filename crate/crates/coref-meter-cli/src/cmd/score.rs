use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde_json::{json, Value};

use coref_meter::corpus::PartitionSide;
use coref_meter::metrics::{score_pairs, ScoreOptions};

use crate::cmd::{AggregationArg, Format};
use crate::input;
use crate::report::{cell, deliver, md_footer, md_table, to_json_text, RunMeta};

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Gold annotations (.conll, or .jsonl documents).
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,

    /// System annotations; JSONL documents use their predicted_clusters
    /// field when present.
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,

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

pub fn run(args: ScoreArgs) -> Result<()> {
    let meta = RunMeta::new(
        "score",
        json!({
            "gold": args.gold,
            "pred": args.pred,
            "keep_singletons": args.keep_singletons,
            "aggregation": format!("{:?}", args.aggregation).to_lowercase(),
        }),
    );

    let gold = input::load_documents(&args.gold, PartitionSide::Gold)?;
    let pred = input::load_documents(&args.pred, PartitionSide::Predicted)?;
    let pairs: Vec<_> = input::pair_documents(gold, pred)?
        .into_iter()
        .map(|(_, g, p)| (g, p))
        .collect();

    let options = ScoreOptions {
        keep_singletons: args.keep_singletons,
        aggregation: args.aggregation.into(),
    };
    let coref = score_pairs(&pairs, &options);
    let wrapped = meta.wrap(serde_json::to_value(&coref)?);

    let text = match args.format {
        Format::Json => to_json_text(&wrapped),
        Format::Md => render_md(&wrapped),
    };
    deliver(args.out.as_deref(), &text)
}

/// Markdown render of the score report JSON.
pub fn render_md(r: &Value) -> String {
    let mut rows = Vec::new();
    for metric in ["muc", "b3", "ceaf_e"] {
        let m = &r[metric];
        rows.push(vec![
            metric.to_string(),
            cell(&m["recall"]),
            cell(&m["precision"]),
            cell(&m["f1"]),
            cell(&m["degenerate"]),
        ]);
    }
    let mut out = String::from("# Coreference score\n\n");
    out.push_str(&md_table(&["metric", "recall", "precision", "f1", "degenerate"], &rows));
    out.push_str(&format!("\nCoNLL F1: {}\n", cell(&r["conll_f1"])));
    out.push_str(&format!(
        "\nDocuments: {} · gold mentions: {} · system mentions: {} · singletons {} · {} aggregation · CEAF similarity {}\n",
        cell(&r["documents"]),
        cell(&r["gold_mentions"]),
        cell(&r["pred_mentions"]),
        if r["keep_singletons"].as_bool().unwrap_or(false) { "kept" } else { "dropped" },
        cell(&r["aggregation"]),
        cell(&r["ceaf_similarity"]),
    ));
    out.push_str(&md_footer(r));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::RunMeta;

    #[test]
    fn markdown_is_a_render_of_the_json() {
        let meta = RunMeta::new("score", serde_json::json!({}));
        let wrapped = meta.wrap(serde_json::json!({
            "muc": {"recall": 0.5, "precision": 1.0, "f1": 0.6666666666666666, "degenerate": false},
            "b3": {"recall": 1.0, "precision": 0.4444444444444444, "f1": 0.6153846153846154, "degenerate": false},
            "ceaf_e": {"recall": 0.8, "precision": 0.8, "f1": 0.8, "degenerate": false},
            "conll_f1": 0.694017094017094,
            "documents": 1, "gold_mentions": 3, "pred_mentions": 3,
            "keep_singletons": false, "aggregation": "micro", "ceaf_similarity": "phi4",
        }));
        let md = render_md(&wrapped);
        assert!(md.contains("| muc | 0.5 | 1.0 | 0.6666666666666666 | false |"), "{md}");
        assert!(md.contains("CoNLL F1: 0.694017094017094"), "{md}");
        assert!(md.contains(&wrapped["config_hash"].as_str().unwrap()[..16]), "{md}");
    }
}
