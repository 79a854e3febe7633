//! CoNLL-2012 shared-task files: whitespace-separated columns, one token
//! per line, coreference brackets in the last column (`(12`, `12)`, `(12)`,
//! several items joined by `|`). Documents are bracketed by
//! `#begin document (<id>); part <nnn>` / `#end document`; sentences are
//! separated by blank lines.
//!
//! The parser keeps every cluster it finds, including singletons; singleton
//! policy belongs to scoring, not ingestion. Mentions that would cross a
//! sentence boundary are dropped with a counted warning. A bracket still
//! open at `#end document` is an error.

use std::collections::HashMap;

use super::document::{Document, EntityPartition, Mention};
use super::ParseError;

/// Which partition of the [`Document`] the file's coreference column fills.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionSide {
    Gold,
    Predicted,
}

pub fn parse_conll_coref(path: &std::path::Path, side: PartitionSide) -> Result<(Vec<Document>, Vec<String>), ParseError> {
    let text = super::read_to_string(path)?;
    parse_conll_coref_str(&text, &path.display().to_string(), side)
}

struct DocBuilder {
    base: String,
    part: Option<String>,
    begin_line: usize,
    sentences: Vec<Vec<String>>,
    speakers: Vec<Vec<String>>,
    saw_speaker_column: bool,
    current_tokens: Vec<String>,
    current_speakers: Vec<String>,
    tokens_so_far: usize,
    open: HashMap<u64, Vec<(usize, usize, usize)>>, // cluster -> stack of (global start, line, sentence)
    clusters: std::collections::BTreeMap<u64, Vec<Mention>>,
    cross_sentence: usize,
}

impl DocBuilder {
    fn doc_id(&self) -> String {
        match &self.part {
            Some(p) => format!("{}.p{}", self.base, p),
            None => self.base.clone(),
        }
    }

    fn flush_sentence(&mut self) {
        if self.current_tokens.is_empty() {
            return;
        }
        self.tokens_so_far += self.current_tokens.len();
        self.sentences.push(std::mem::take(&mut self.current_tokens));
        self.speakers.push(std::mem::take(&mut self.current_speakers));
    }
}

pub fn parse_conll_coref_str(
    text: &str,
    file: &str,
    side: PartitionSide,
) -> Result<(Vec<Document>, Vec<String>), ParseError> {
    let mut docs = Vec::new();
    let mut warnings = Vec::new();
    let mut builder: Option<DocBuilder> = None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end();
        if let Some(rest) = line.strip_prefix("#begin document") {
            if builder.is_some() {
                return Err(ParseError::line(file, lineno, "#begin document before previous document ended"));
            }
            let (base, part) = parse_begin_header(rest);
            if base.is_empty() {
                return Err(ParseError::line(file, lineno, "missing document id in #begin header"));
            }
            builder = Some(DocBuilder {
                base,
                part,
                begin_line: lineno,
                sentences: Vec::new(),
                speakers: Vec::new(),
                saw_speaker_column: true,
                current_tokens: Vec::new(),
                current_speakers: Vec::new(),
                tokens_so_far: 0,
                open: HashMap::new(),
                clusters: Default::default(),
                cross_sentence: 0,
            });
            continue;
        }
        if line == "#end document" {
            let mut b = builder
                .take()
                .ok_or_else(|| ParseError::line(file, lineno, "#end document without #begin"))?;
            b.flush_sentence();
            docs.push(finish_doc(b, file, lineno, side, &mut warnings)?);
            continue;
        }
        if line.starts_with('#') {
            continue; // other comment lines
        }
        if line.is_empty() {
            if let Some(b) = builder.as_mut() {
                b.flush_sentence();
            }
            continue;
        }
        let b = builder
            .as_mut()
            .ok_or_else(|| ParseError::line(file, lineno, "token line outside any document"))?;
        parse_token_line(b, line, file, lineno)?;
    }
    if let Some(b) = builder {
        return Err(ParseError::line(
            file,
            b.begin_line,
            format!("document {} never closed with #end document", b.doc_id()),
        ));
    }
    Ok((docs, warnings))
}

fn parse_begin_header(rest: &str) -> (String, Option<String>) {
    let rest = rest.trim();
    if let Some(inner) = rest.strip_prefix('(') {
        if let Some(close) = inner.find(')') {
            let base = inner[..close].to_string();
            let tail = inner[close + 1..].trim();
            let part = tail
                .strip_prefix(';')
                .map(str::trim)
                .and_then(|t| t.strip_prefix("part"))
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty());
            return (base, part);
        }
    }
    (rest.to_string(), None)
}

fn parse_token_line(b: &mut DocBuilder, line: &str, file: &str, lineno: usize) -> Result<(), ParseError> {
    let cols: Vec<&str> = line.split_whitespace().collect();
    if cols.len() < 5 {
        return Err(ParseError::line(file, lineno, format!("expected at least 5 columns, found {}", cols.len())));
    }
    let word = cols[3].to_string();
    if cols.len() >= 12 {
        b.current_speakers.push(cols[9].to_string());
    } else {
        b.saw_speaker_column = false;
        b.current_speakers.push("-".to_string());
    }
    let global = b.tokens_so_far + b.current_tokens.len();
    let sentence = b.sentences.len();
    b.current_tokens.push(word);

    let coref = cols[cols.len() - 1];
    if coref == "-" || coref == "_" {
        return Ok(());
    }
    for item in coref.split('|') {
        let starts = item.starts_with('(');
        let ends = item.ends_with(')');
        let digits = item.trim_start_matches('(').trim_end_matches(')');
        let id: u64 = digits.parse().map_err(|_| {
            ParseError::cell(file, lineno, cols.len(), format!("bad coreference item {item:?}"))
        })?;
        match (starts, ends) {
            (true, true) => b.clusters.entry(id).or_default().push(Mention::new(global, global)),
            (true, false) => b.open.entry(id).or_default().push((global, lineno, sentence)),
            (false, true) => {
                let stack = b.open.entry(id).or_default();
                let Some((start, _open_line, open_sentence)) = stack.pop() else {
                    return Err(ParseError::cell(
                        file,
                        lineno,
                        cols.len(),
                        format!("cluster {id} closed but never opened"),
                    ));
                };
                if open_sentence != sentence {
                    b.cross_sentence += 1;
                } else {
                    b.clusters.entry(id).or_default().push(Mention::new(start, global));
                }
            }
            (false, false) => {
                return Err(ParseError::cell(file, lineno, cols.len(), format!("bad coreference item {item:?}")))
            }
        }
    }
    Ok(())
}

fn finish_doc(
    b: DocBuilder,
    file: &str,
    end_line: usize,
    side: PartitionSide,
    warnings: &mut Vec<String>,
) -> Result<Document, ParseError> {
    let doc_id = b.doc_id();
    if let Some((id, stack)) = b.open.iter().find(|(_, s)| !s.is_empty()) {
        let (_, open_line, _) = stack[0];
        return Err(ParseError::line(
            file,
            end_line,
            format!("doc {doc_id}: cluster {id} opened at line {open_line} never closed"),
        ));
    }
    if b.cross_sentence > 0 {
        warnings.push(format!("{file}: doc {doc_id}: dropped {} cross-sentence mention(s)", b.cross_sentence));
    }
    let entities: Vec<Vec<Mention>> = b.clusters.into_values().collect();
    let (partition, deduped) = EntityPartition::from_entities(entities)
        .map_err(|e| ParseError::line(file, end_line, format!("doc {doc_id}: {e}")))?;
    if deduped > 0 {
        warnings.push(format!("{file}: doc {doc_id}: deduplicated {deduped} repeated span(s) within a cluster"));
    }
    let genre = b.base.split('/').next().filter(|_| b.base.contains('/')).map(str::to_string);
    let speakers = if b.saw_speaker_column && !b.speakers.is_empty() {
        Some(b.speakers)
    } else {
        None
    };
    let (gold, predicted) = match side {
        PartitionSide::Gold => (partition, None),
        PartitionSide::Predicted => (EntityPartition::default(), Some(partition)),
    };
    let doc = Document {
        doc_id,
        genre,
        sentences: b.sentences,
        speakers,
        gold,
        predicted,
        deps: None,
    };
    doc.validate()
        .map_err(|e| ParseError::line(file, end_line, e.to_string()))?;
    Ok(doc)
}
