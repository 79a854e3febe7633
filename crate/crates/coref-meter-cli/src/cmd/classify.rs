use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use serde_json::json;

use coref_meter::corpus::Document;
use coref_meter::typing::{type_partition, CoreferenceType, TypingConfig};

use crate::cmd::SideArg;
use crate::input;
use crate::report::{deliver, RunMeta};

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Annotated documents (.conll, or .jsonl documents).
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,

    /// Dependency trees (CoNLL-U), one per sentence in document order.
    /// Without them every mention comes back untyped with a reason.
    #[arg(long, value_name = "FILE")]
    deps: Option<PathBuf>,

    /// Which partition the annotations describe.
    #[arg(long, value_enum, default_value_t = SideArg::Gold)]
    side: SideArg,

    /// Types file (JSON lines; stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: ClassifyArgs) -> Result<()> {
    let meta = RunMeta::new(
        "classify",
        json!({
            "docs": args.docs,
            "deps": args.deps,
            "side": format!("{:?}", args.side).to_lowercase(),
        }),
    );

    let mut docs = input::load_documents(&args.docs, args.side.into())?;
    if let Some(deps) = &args.deps {
        input::attach_deps(&mut docs, deps)?;
    }

    let cfg = TypingConfig::default();
    let typed: Vec<_> = docs.iter().map(|doc| classify_doc(doc, args.side, &cfg)).collect::<Result<_>>()?;

    let mut mentions = 0usize;
    let mut untyped = 0usize;
    let mut per_type: BTreeMap<CoreferenceType, usize> = BTreeMap::new();
    let mut lines = Vec::new();
    for (doc, (rows, stats)) in docs.iter().zip(&typed) {
        mentions += stats.mentions;
        untyped += stats.untyped;
        for (t, n) in &stats.per_type {
            *per_type.entry(*t).or_insert(0) += n;
        }
        for tm in rows {
            lines.push(
                json!({
                    "doc_id": doc.doc_id,
                    "start": tm.mention.start,
                    "end": tm.mention.end,
                    "types": tm.types,
                    "evidence": tm.evidence,
                    "untyped": tm.untyped,
                })
                .to_string(),
            );
        }
    }

    let stats = json!({ "stats": { "mentions": mentions, "untyped": untyped, "per_type": per_type } });
    let mut text = meta.meta_line(stats);
    text.push('\n');
    for line in lines {
        text.push_str(&line);
        text.push('\n');
    }
    deliver(args.out.as_deref(), &text)
}

fn classify_doc(
    doc: &Document,
    side: SideArg,
    cfg: &TypingConfig,
) -> Result<(Vec<coref_meter::typing::TypedMention>, coref_meter::typing::TypingStats)> {
    let partition = match side {
        SideArg::Gold => &doc.gold,
        SideArg::Pred => match &doc.predicted {
            Some(p) => p,
            None => bail!("document {} has no predicted partition to classify", doc.doc_id),
        },
    };
    Ok(type_partition(doc, partition, cfg))
}
