//! JSON-lines documents: one object per line with `doc_id`, nested token
//! arrays under `sentences`, clusters as arrays of `[start, end]` pairs
//! (inclusive, document-global), optional `predicted_clusters`, `speakers`
//! (same shape as `sentences`) and `genre`. This carries the same data as
//! the CoNLL coreference format and normalizes to the same [`Document`].

use serde::{Deserialize, Serialize};

use super::document::{Document, EntityPartition, Mention};
use super::ParseError;

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    doc_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    genre: Option<String>,
    sentences: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speakers: Option<Vec<Vec<String>>>,
    clusters: Vec<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_clusters: Option<Vec<Vec<(usize, usize)>>>,
}

pub fn parse_docs_jsonl(path: &std::path::Path) -> Result<(Vec<Document>, Vec<String>), ParseError> {
    let text = super::read_to_string(path)?;
    parse_docs_jsonl_str(&text, &path.display().to_string())
}

pub fn parse_docs_jsonl_str(text: &str, file: &str) -> Result<(Vec<Document>, Vec<String>), ParseError> {
    let mut docs = Vec::new();
    let mut warnings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: JsonDoc =
            serde_json::from_str(line).map_err(|e| ParseError::line(file, lineno, e.to_string()))?;
        let doc = build_doc(raw, file, lineno, &mut warnings)?;
        docs.push(doc);
    }
    Ok((docs, warnings))
}

fn build_doc(raw: JsonDoc, file: &str, lineno: usize, warnings: &mut Vec<String>) -> Result<Document, ParseError> {
    let sentence_ranges: Vec<(usize, usize)> = {
        let mut at = 0;
        raw.sentences
            .iter()
            .map(|s| {
                let r = (at, at + s.len());
                at += s.len();
                r
            })
            .collect()
    };
    let token_count: usize = raw.sentences.iter().map(Vec::len).sum();
    let mut convert = |clusters: Vec<Vec<(usize, usize)>>, label: &str| -> Result<EntityPartition, ParseError> {
        let mut entities = Vec::with_capacity(clusters.len());
        let mut dropped = 0usize;
        for cluster in clusters {
            let mut entity = Vec::with_capacity(cluster.len());
            for (start, end) in cluster {
                if start > end {
                    return Err(ParseError::line(
                        file,
                        lineno,
                        format!("doc {}: {label} span [{start},{end}] has start > end", raw.doc_id),
                    ));
                }
                if end >= token_count {
                    return Err(ParseError::line(
                        file,
                        lineno,
                        format!(
                            "doc {}: {label} span [{start},{end}] out of range ({token_count} tokens)",
                            raw.doc_id
                        ),
                    ));
                }
                let in_one_sentence = sentence_ranges.iter().any(|(a, b)| start >= *a && end < *b);
                if !in_one_sentence {
                    dropped += 1;
                    continue;
                }
                entity.push(Mention::new(start, end));
            }
            entities.push(entity);
        }
        if dropped > 0 {
            warnings.push(format!(
                "{file}: doc {}: dropped {dropped} cross-sentence {label} span(s)",
                raw.doc_id
            ));
        }
        let (partition, deduped) = EntityPartition::from_entities(entities)
            .map_err(|e| ParseError::line(file, lineno, format!("doc {}: {e}", raw.doc_id)))?;
        if deduped > 0 {
            warnings.push(format!(
                "{file}: doc {}: deduplicated {deduped} repeated {label} span(s) within a cluster",
                raw.doc_id
            ));
        }
        Ok(partition)
    };
    let gold = convert(raw.clusters, "gold")?;
    let predicted = raw.predicted_clusters.map(|c| convert(c, "predicted")).transpose()?;
    let doc = Document {
        doc_id: raw.doc_id,
        genre: raw.genre,
        sentences: raw.sentences,
        speakers: raw.speakers,
        gold,
        predicted,
        deps: None,
    };
    doc.validate().map_err(|e| ParseError::line(file, lineno, e.to_string()))?;
    Ok(doc)
}

/// One JSON object per document, canonical cluster order, trailing newline.
pub fn serialize_docs_jsonl(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        let to_pairs = |p: &EntityPartition| -> Vec<Vec<(usize, usize)>> {
            p.entities()
                .iter()
                .map(|e| e.iter().map(|m| (m.start, m.end)).collect())
                .collect()
        };
        let raw = JsonDoc {
            doc_id: doc.doc_id.clone(),
            genre: doc.genre.clone(),
            sentences: doc.sentences.clone(),
            speakers: doc.speakers.clone(),
            clusters: to_pairs(&doc.gold),
            predicted_clusters: doc.predicted.as_ref().map(&to_pairs),
        };
        out.push_str(&serde_json::to_string(&raw).expect("document serialization cannot fail"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_then_serialize_round_trips() {
        let line = concat!(
            r#"{"doc_id":"d1","genre":"tc","sentences":[["I","win"],["I","lost"]],"#,
            r#""speakers":[["A","A"],["B","B"]],"clusters":[[[0,0],[2,2]]],"predicted_clusters":[[[0,1],[2,3]]]}"#,
            "\n"
        );
        let (docs, warnings) = parse_docs_jsonl_str(line, "t").unwrap();
        assert!(warnings.is_empty());
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].gold.mention_count(), 2);
        assert_eq!(docs[0].predicted.as_ref().unwrap().mention_count(), 2);
        let out = serialize_docs_jsonl(&docs);
        let (reparsed, _) = parse_docs_jsonl_str(&out, "t").unwrap();
        assert_eq!(docs, reparsed);
    }

    #[test]
    fn out_of_range_span_is_an_error() {
        let line = r#"{"doc_id":"d","sentences":[["a"]],"clusters":[[[0,5]]]}"#;
        let err = parse_docs_jsonl_str(line, "t").unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn cross_sentence_span_warns_and_drops() {
        let line = r#"{"doc_id":"d","sentences":[["a","b"],["c"]],"clusters":[[[1,2],[0,0]]]}"#;
        let (docs, warnings) = parse_docs_jsonl_str(line, "t").unwrap();
        assert_eq!(docs[0].gold.mention_count(), 1);
        assert!(warnings[0].contains("cross-sentence"));
    }
}
