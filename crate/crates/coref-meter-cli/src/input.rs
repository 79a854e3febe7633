//! Shared input loading: file reads with the path in every error,
//! format sniffing for document corpora, dependency-tree attachment and
//! doc-id pairing.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use coref_meter::corpus::{
    parse_conll_coref, parse_docs_jsonl, parse_conllu, DependencyTree, Document, EntityPartition,
    PartitionSide,
};

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

/// Loads a document corpus, sniffing JSON lines by extension and treating
/// everything else as CoNLL coreference annotations for `side`.
pub fn load_documents(path: &Path, side: PartitionSide) -> Result<Vec<Document>> {
    let jsonl = path.extension().is_some_and(|e| e == "jsonl" || e == "json");
    let (docs, warnings) = if jsonl {
        parse_docs_jsonl(path)?
    } else {
        parse_conll_coref(path, side)?
    };
    print_warnings(&warnings);
    Ok(docs)
}

/// The partition a file contributes when used on the system side: for
/// JSON-lines corpora the `predicted_clusters` field wins when present.
pub fn predicted_of(doc: &Document) -> EntityPartition {
    doc.predicted.clone().unwrap_or_else(|| doc.gold.clone())
}

/// Attaches a flat tree sequence to documents, consuming one tree per
/// sentence in document order.
pub fn attach_deps(docs: &mut [Document], path: &Path) -> Result<()> {
    let trees: Vec<DependencyTree> = parse_conllu(path)?;
    let wanted: usize = docs.iter().map(|d| d.sentences.len()).sum();
    if trees.len() != wanted {
        bail!(
            "{}: has {} trees but the documents have {} sentences",
            path.display(),
            trees.len(),
            wanted
        );
    }
    let mut it = trees.into_iter();
    for doc in docs.iter_mut() {
        let take = doc.sentences.len();
        doc.deps = Some((&mut it).take(take).collect());
        doc.validate().with_context(|| format!("document {}", doc.doc_id))?;
    }
    Ok(())
}

/// Pairs gold and system documents by doc id, in gold file order. Ids
/// missing from either side are an error that names them.
pub fn pair_documents(
    gold: Vec<Document>,
    pred: Vec<Document>,
) -> Result<Vec<(String, EntityPartition, EntityPartition)>> {
    let mut pred_by_id: BTreeMap<String, EntityPartition> =
        pred.iter().map(|d| (d.doc_id.clone(), predicted_of(d))).collect();
    let mut pairs = Vec::with_capacity(gold.len());
    let mut missing = Vec::new();
    for doc in gold {
        match pred_by_id.remove(&doc.doc_id) {
            Some(p) => pairs.push((doc.doc_id, doc.gold, p)),
            None => missing.push(doc.doc_id),
        }
    }
    if !missing.is_empty() {
        bail!("documents missing from the system side: {}", missing.join(", "));
    }
    if !pred_by_id.is_empty() {
        let extra: Vec<String> = pred_by_id.into_keys().collect();
        bail!("documents missing from the gold side: {}", extra.join(", "));
    }
    Ok(pairs)
}
