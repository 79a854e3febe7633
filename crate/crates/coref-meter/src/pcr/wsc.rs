//! Loader for Winograd-style challenge files.
//!
//! Input is JSON lines with raw text rather than gold coreference:
//! `{"id": ..., "text": ..., "pronoun": ..., "candidate1": ...,
//! "candidate2": ..., "answer": 1|2, "pronoun_occurrence": n?}`.
//! The text is tokenized by a caller-supplied splitter (defaulting to
//! whitespace with leading/trailing punctuation peeled off), the pronoun
//! is located as the n-th case-insensitive token match (first by default),
//! and each candidate as its first token-subsequence occurrence.

use serde::Deserialize;

use super::PcrInstance;
use crate::corpus::ParseError;

/// Whitespace split with leading and trailing ASCII punctuation peeled
/// into separate tokens; inner punctuation (contractions, hyphens) stays.
pub fn default_splitter(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut rest = chunk;
        let mut lead = Vec::new();
        while let Some(c) = rest.chars().next() {
            if c.is_ascii_punctuation() && rest.chars().count() > 1 {
                lead.push(c.to_string());
                rest = &rest[c.len_utf8()..];
            } else {
                break;
            }
        }
        let mut trail = Vec::new();
        while let Some(c) = rest.chars().last() {
            if c.is_ascii_punctuation() && rest.chars().count() > 1 {
                trail.push(c.to_string());
                rest = &rest[..rest.len() - c.len_utf8()];
            } else {
                break;
            }
        }
        out.extend(lead);
        if !rest.is_empty() {
            out.push(rest.to_string());
        }
        out.extend(trail.into_iter().rev());
    }
    out
}

#[derive(Deserialize)]
struct WscRow {
    id: String,
    text: String,
    pronoun: String,
    candidate1: String,
    candidate2: String,
    answer: u8,
    #[serde(default)]
    pronoun_occurrence: Option<usize>,
}

pub fn load_wsc_jsonl_str(
    text: &str,
    file: &str,
    dataset: &str,
    split: impl Fn(&str) -> Vec<String>,
) -> Result<Vec<PcrInstance>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let row: WscRow = serde_json::from_str(line)
            .map_err(|e| ParseError::line(file, lineno, format!("bad challenge record: {e}")))?;
        if row.answer != 1 && row.answer != 2 {
            return Err(ParseError::line(file, lineno, format!("answer {} (want 1 or 2)", row.answer)));
        }
        let tokens = split(&row.text);
        if tokens.is_empty() {
            return Err(ParseError::line(file, lineno, "empty text"));
        }

        let occurrence = row.pronoun_occurrence.unwrap_or(1);
        if occurrence == 0 {
            return Err(ParseError::line(file, lineno, "pronoun_occurrence is 1-based"));
        }
        let pronoun_lower = row.pronoun.to_lowercase();
        let pronoun_at = tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.to_lowercase() == pronoun_lower)
            .map(|(i, _)| i)
            .nth(occurrence - 1)
            .ok_or_else(|| {
                ParseError::line(
                    file,
                    lineno,
                    format!("pronoun {:?} (occurrence {occurrence}) not found in text", row.pronoun),
                )
            })?;

        let locate = |needle: &str, which: &str| -> Result<(usize, usize), ParseError> {
            let want = split(needle);
            if want.is_empty() {
                return Err(ParseError::line(file, lineno, format!("{which} is empty")));
            }
            let lower: Vec<String> = want.iter().map(|t| t.to_lowercase()).collect();
            tokens
                .windows(lower.len())
                .position(|w| w.iter().map(|t| t.to_lowercase()).eq(lower.iter().cloned()))
                .map(|s| (s, s + lower.len() - 1))
                .ok_or_else(|| {
                    ParseError::line(file, lineno, format!("{which} {needle:?} not found in text"))
                })
        };
        let c1 = locate(&row.candidate1, "candidate1")?;
        let c2 = locate(&row.candidate2, "candidate2")?;

        out.push(PcrInstance {
            instance_id: format!("{dataset}:{}", row.id),
            dataset: dataset.to_string(),
            doc_id: row.id,
            sentence_index: 0,
            context: tokens,
            speakers: None,
            pronoun: (pronoun_at, pronoun_at),
            candidates: [c1, c2],
            gold: row.answer,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitter_peels_punctuation() {
        assert_eq!(default_splitter("He said, \"stop it.\""), ["He", "said", ",", "\"", "stop", "it", ".", "\""]);
        assert_eq!(default_splitter("the well-known don't"), ["the", "well-known", "don't"]);
        assert_eq!(default_splitter("..."), [".", ".", "."]);
    }

    #[test]
    fn loads_and_locates_spans() {
        let line = r#"{"id":"w1","text":"The trophy does not fit in the suitcase because it is too big.","pronoun":"it","candidate1":"the trophy","candidate2":"the suitcase","answer":1}"#;
        let got = load_wsc_jsonl_str(line, "w", "wsc", default_splitter).unwrap();
        assert_eq!(got.len(), 1);
        let inst = &got[0];
        assert_eq!(inst.pronoun_text(), "it");
        assert_eq!(inst.span_text(inst.candidates[0]), "The trophy");
        assert_eq!(inst.span_text(inst.candidates[1]), "the suitcase");
        assert_eq!(inst.gold, 1);
        assert_eq!(inst.instance_id, "wsc:w1");
    }

    #[test]
    fn occurrence_picks_later_match() {
        let line = r#"{"id":"w2","text":"it rained and it snowed","pronoun":"it","candidate1":"rained","candidate2":"snowed","answer":2,"pronoun_occurrence":2}"#;
        let got = load_wsc_jsonl_str(line, "w", "d", default_splitter).unwrap();
        assert_eq!(got[0].pronoun, (3, 3));
    }

    #[test]
    fn missing_candidate_is_an_error() {
        let line = r#"{"id":"w3","text":"it rained","pronoun":"it","candidate1":"sun","candidate2":"rain","answer":1}"#;
        let err = load_wsc_jsonl_str(line, "wsc.jsonl", "d", default_splitter).unwrap_err();
        assert!(err.to_string().contains("candidate1"));
    }
}
