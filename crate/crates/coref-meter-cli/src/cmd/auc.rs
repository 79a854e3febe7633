use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde_json::json;

use coref_meter::consistency::{auc, parse_labeled_events_str, parse_scored_events_str, Label};

use crate::input;
use crate::report::{deliver, strip_meta_lines, to_json_text, RunMeta};

#[derive(Args, Debug)]
pub struct AucArgs {
    /// Labeled events: JSON lines of {"subject", "verb", "object",
    /// "label"} where the label folds to plausible or implausible.
    #[arg(long, value_name = "FILE")]
    events: PathBuf,

    /// Scores: JSON lines of {"subject", "verb", "object", "value"},
    /// as `plaus score` writes them.
    #[arg(long, value_name = "FILE")]
    scores: PathBuf,

    /// Report file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: AucArgs) -> Result<()> {
    let meta = RunMeta::new("auc", json!({ "events": args.events, "scores": args.scores }));

    let events_text = strip_meta_lines(&input::read(&args.events)?);
    let events = parse_labeled_events_str(&events_text, &args.events.display().to_string())?;
    let scores_text = strip_meta_lines(&input::read(&args.scores)?);
    let scores = parse_scored_events_str(&scores_text, &args.scores.display().to_string())?;

    let value = auc(&events, &scores)?;
    let plausible = events.iter().filter(|e| e.label == Label::Plausible).count();

    let wrapped = meta.wrap(json!({
        "auc": value,
        "events": events.len(),
        "plausible": plausible,
        "implausible": events.len() - plausible,
    }));
    deliver(args.out.as_deref(), &to_json_text(&wrapped))
}
