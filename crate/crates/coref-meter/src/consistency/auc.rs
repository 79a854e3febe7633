//! Ranking evaluation of plausibility scores against binary labels.
//!
//! AUC is the probability that a uniformly drawn plausible event outscores
//! a uniformly drawn implausible one, with ties crediting half. Computed
//! from integer win/tie counts over score-sorted groups, it equals the
//! exhaustive pairwise enumeration exactly.
//!
//! Labeled events arrive as JSON lines. Frequency-style answers are folded
//! to the binary labels on ingestion: `never` means implausible, any other
//! attested frequency (always, usually, sometimes, rarely) means
//! plausible.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ParseError, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Plausible,
    Implausible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledEvent {
    #[serde(flatten)]
    pub triple: Triple,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Error)]
pub enum AucError {
    #[error("event {0} has no score")]
    MissingScore(String),
    #[error("all {0} events share one label; AUC needs both classes")]
    SingleClass(usize),
    #[error("no events")]
    Empty,
}

/// Exact AUC of `scores` against the event labels.
///
/// Every event must have a score; inputs with a single class (or none)
/// are an error rather than a degenerate number.
pub fn auc(events: &[LabeledEvent], scores: &BTreeMap<Triple, f64>) -> Result<f64, AucError> {
    if events.is_empty() {
        return Err(AucError::Empty);
    }
    let mut ranked: Vec<(f64, Label)> = Vec::with_capacity(events.len());
    for e in events {
        let s = scores
            .get(&e.triple)
            .ok_or_else(|| AucError::MissingScore(e.triple.to_string()))?;
        ranked.push((*s, e.label));
    }
    let pos = ranked.iter().filter(|(_, l)| *l == Label::Plausible).count() as u64;
    let neg = ranked.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(AucError::SingleClass(ranked.len()));
    }

    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut wins = 0u64;
    let mut ties = 0u64;
    let mut neg_below = 0u64;
    let mut i = 0;
    while i < ranked.len() {
        let mut j = i;
        let mut group_pos = 0u64;
        let mut group_neg = 0u64;
        while j < ranked.len() && ranked[j].0 == ranked[i].0 {
            match ranked[j].1 {
                Label::Plausible => group_pos += 1,
                Label::Implausible => group_neg += 1,
            }
            j += 1;
        }
        wins += group_pos * neg_below;
        ties += group_pos * group_neg;
        neg_below += group_neg;
        i = j;
    }
    Ok((wins as f64 + 0.5 * ties as f64) / (pos as f64 * neg as f64))
}

/// Reads labeled events, folding frequency answers into binary labels.
/// Lines look like `{"subject":..,"verb":..,"object":..,"label":..}` with
/// an optional `source`.
pub fn parse_labeled_events_str(text: &str, file: &str) -> Result<Vec<LabeledEvent>, ParseError> {
    #[derive(Deserialize)]
    struct Wire {
        subject: String,
        verb: String,
        object: String,
        label: String,
        #[serde(default)]
        source: Option<String>,
    }

    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let w: Wire = serde_json::from_str(line)
            .map_err(|e| ParseError::line(file, lineno, format!("bad event record: {e}")))?;
        let label = match w.label.to_lowercase().as_str() {
            "plausible" | "always" | "usually" | "sometimes" | "rarely" => Label::Plausible,
            "implausible" | "never" => Label::Implausible,
            other => {
                return Err(ParseError::line(
                    file,
                    lineno,
                    format!(
                        "unknown label {other:?}; expected plausible/implausible or a frequency (always, usually, sometimes, rarely, never)"
                    ),
                ))
            }
        };
        out.push(LabeledEvent {
            triple: Triple::new(w.subject, w.verb, w.object),
            label,
            source: w.source,
        });
    }
    Ok(out)
}

pub fn serialize_labeled_events(events: &[LabeledEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("event serializes"));
        out.push('\n');
    }
    out
}

/// Reads score lines (`{"subject":..,"verb":..,"object":..,"value":..}`,
/// the shape the scoring commands emit) into a triple-keyed map. Null
/// values and duplicate triples are rejected: an unscored or ambiguously
/// scored event cannot be ranked.
pub fn parse_scored_events_str(text: &str, file: &str) -> Result<BTreeMap<Triple, f64>, ParseError> {
    #[derive(Deserialize)]
    struct Wire {
        subject: String,
        verb: String,
        object: String,
        value: Option<f64>,
    }

    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let w: Wire = serde_json::from_str(line)
            .map_err(|e| ParseError::line(file, lineno, format!("bad score record: {e}")))?;
        let t = Triple::new(w.subject, w.verb, w.object);
        let Some(v) = w.value else {
            return Err(ParseError::line(file, lineno, format!("event {t} has a null score")));
        };
        if !v.is_finite() {
            return Err(ParseError::line(file, lineno, format!("event {t} has a non-finite score")));
        }
        if out.insert(t.clone(), v).is_some() {
            return Err(ParseError::line(file, lineno, format!("duplicate score for event {t}")));
        }
    }
    Ok(out)
}
