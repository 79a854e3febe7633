//! Binary pronominal-coreference benchmark.
//!
//! Instances are built from gold coreference annotations: a pronoun, its
//! single nominal antecedent within a three-sentence window, and one
//! distractor mention from another entity. Prediction files are scored as
//! accuracy with a 90% confidence interval; an ensemble rule routes between
//! a supervised system and a language model on predicted-cluster size; the
//! challenge-set assumption check compares two models across a challenge
//! set and a reference dataset.

pub mod prompt;
pub mod wsc;

pub use prompt::{format_prompt, Feature, PromptError, PromptOptions};

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Mention, ParseError};
use crate::seeding::rng_for;
use crate::typing::mention_head;

/// Surface forms treated as pronouns, lowercase, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PronounSet(Vec<String>);

impl Default for PronounSet {
    fn default() -> Self {
        PronounSet(
            [
                "she", "her", "he", "him", "them", "they", "it", "his", "hers", "its", "their",
                "theirs", "this", "that", "these", "those",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
        )
    }
}

impl PronounSet {
    /// Lowercases and deduplicates, keeping first-seen order.
    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        let mut out = Vec::new();
        for w in words {
            let w = w.as_ref().trim().to_lowercase();
            if !w.is_empty() && !out.contains(&w) {
                out.push(w);
            }
        }
        PronounSet(out)
    }

    pub fn contains(&self, surface: &str) -> bool {
        let lower = surface.to_lowercase();
        self.0.contains(&lower)
    }

    pub fn words(&self) -> &[String] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcrInstance {
    pub instance_id: String,
    pub dataset: String,
    pub doc_id: String,
    pub sentence_index: usize,
    /// Window tokens; all spans below index into this vector.
    pub context: Vec<String>,
    /// Per-token speaker labels for the window, when the source had them.
    pub speakers: Option<Vec<String>>,
    /// Inclusive token span of the pronoun within `context`.
    pub pronoun: (usize, usize),
    /// The two candidate spans in presentation order.
    pub candidates: [(usize, usize); 2],
    /// Which candidate is the antecedent: 1 or 2.
    pub gold: u8,
}

impl PcrInstance {
    pub fn span_text(&self, span: (usize, usize)) -> String {
        self.context[span.0..=span.1].join(" ")
    }

    pub fn pronoun_text(&self) -> String {
        self.span_text(self.pronoun)
    }

    fn check(&self, file: &str, line: usize) -> Result<(), ParseError> {
        let n = self.context.len();
        let ok = |s: (usize, usize)| s.0 <= s.1 && s.1 < n;
        if !ok(self.pronoun) || !ok(self.candidates[0]) || !ok(self.candidates[1]) {
            return Err(ParseError::line(file, line, "span outside context"));
        }
        if self.gold != 1 && self.gold != 2 {
            return Err(ParseError::line(file, line, format!("gold label {} (want 1 or 2)", self.gold)));
        }
        if let Some(sp) = &self.speakers {
            if sp.len() != n {
                return Err(ParseError::line(file, line, "speaker list length differs from context"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExtractStats {
    pub documents: usize,
    pub documents_skipped: usize,
    pub pronouns_seen: usize,
    pub emitted: usize,
    pub skipped_no_antecedent: usize,
    pub skipped_multiple_antecedents: usize,
    pub skipped_not_preceding: usize,
    pub skipped_not_nominal: usize,
    pub skipped_no_distractor: usize,
    pub warnings: Vec<String>,
}

impl ExtractStats {
    fn merge(&mut self, other: ExtractStats) {
        self.documents += other.documents;
        self.documents_skipped += other.documents_skipped;
        self.pronouns_seen += other.pronouns_seen;
        self.emitted += other.emitted;
        self.skipped_no_antecedent += other.skipped_no_antecedent;
        self.skipped_multiple_antecedents += other.skipped_multiple_antecedents;
        self.skipped_not_preceding += other.skipped_not_preceding;
        self.skipped_not_nominal += other.skipped_not_nominal;
        self.skipped_no_distractor += other.skipped_no_distractor;
        self.warnings.extend(other.warnings);
    }
}

/// Build instances from gold annotations.
///
/// The window is the pronoun's sentence plus the two preceding sentences.
/// A pronoun yields an instance when exactly one coreferring mention lies
/// fully in the window, that mention ends strictly before the pronoun and
/// is nominal, and at least one mention of another entity also lies in the
/// window (one is drawn uniformly when there are several). Candidate order
/// is a fair coin. All randomness comes from per-document substreams of
/// `seed`, so output is independent of scheduling and thread count.
pub fn extract_instances(
    docs: &[Document],
    pronouns: &PronounSet,
    dataset: &str,
    seed: u64,
) -> (Vec<PcrInstance>, ExtractStats) {
    let per_doc: Vec<(Vec<PcrInstance>, ExtractStats)> = docs
        .par_iter()
        .map(|doc| extract_from_doc(doc, pronouns, dataset, seed))
        .collect();
    let mut instances = Vec::new();
    let mut stats = ExtractStats::default();
    for (mut i, s) in per_doc {
        instances.append(&mut i);
        stats.merge(s);
    }
    (instances, stats)
}

fn extract_from_doc(
    doc: &Document,
    pronouns: &PronounSet,
    dataset: &str,
    seed: u64,
) -> (Vec<PcrInstance>, ExtractStats) {
    let mut stats = ExtractStats { documents: 1, ..Default::default() };
    if doc.sentences.is_empty() {
        stats.documents_skipped += 1;
        stats.warnings.push(format!("{}: no sentence boundaries, skipped", doc.doc_id));
        return (Vec::new(), stats);
    }
    let mut rng = rng_for(seed, &format!("pcr:{}", doc.doc_id));
    let ranges = doc.sentence_ranges();
    let index = doc.gold.entity_index();
    let mut mentions: Vec<Mention> = doc.gold.mentions().collect();
    mentions.sort();

    let mut out = Vec::new();
    for &m in &mentions {
        if m.start != m.end {
            continue;
        }
        let surface = match doc.token(m.start) {
            Some(t) => t,
            None => continue,
        };
        if !pronouns.contains(surface) {
            continue;
        }
        stats.pronouns_seen += 1;

        let sent = match doc.sentence_of(m.start) {
            Some(s) => s,
            None => continue,
        };
        let w_start = ranges[sent.saturating_sub(2)].start;
        let w_end = ranges[sent].end; // exclusive
        let in_window = |x: &Mention| x.start >= w_start && x.end < w_end;

        let antecedents: Vec<Mention> =
            doc.gold.coreferring(m).into_iter().filter(in_window).collect();
        match antecedents.len() {
            0 => {
                stats.skipped_no_antecedent += 1;
                continue;
            }
            1 => {}
            _ => {
                stats.skipped_multiple_antecedents += 1;
                continue;
            }
        }
        let antecedent = antecedents[0];
        if antecedent.end >= m.start {
            stats.skipped_not_preceding += 1;
            continue;
        }
        if !is_nominal(doc, antecedent, pronouns) {
            stats.skipped_not_nominal += 1;
            continue;
        }

        let own_entity = index.get(&m).copied();
        let distractors: Vec<Mention> = mentions
            .iter()
            .copied()
            .filter(|x| in_window(x) && index.get(x).copied() != own_entity)
            .collect();
        if distractors.is_empty() {
            stats.skipped_no_distractor += 1;
            continue;
        }
        let distractor = if distractors.len() == 1 {
            distractors[0]
        } else {
            distractors[rng.random_range(0..distractors.len())]
        };

        let antecedent_first = rng.random::<bool>();
        let rebase = |x: Mention| (x.start - w_start, x.end - w_start);
        let (candidates, gold) = if antecedent_first {
            ([rebase(antecedent), rebase(distractor)], 1)
        } else {
            ([rebase(distractor), rebase(antecedent)], 2)
        };

        let context: Vec<String> = (w_start..w_end)
            .map(|i| doc.token(i).unwrap_or_default().to_string())
            .collect();
        let speakers = doc
            .speakers
            .as_ref()
            .map(|_| (w_start..w_end).map(|i| doc.speaker_of(i).unwrap_or("-").to_string()).collect());

        out.push(PcrInstance {
            instance_id: format!("{}:{}:{}", doc.doc_id, sent, m.start),
            dataset: dataset.to_string(),
            doc_id: doc.doc_id.clone(),
            sentence_index: sent,
            context,
            speakers,
            pronoun: rebase(m),
            candidates,
            gold,
        });
        stats.emitted += 1;
    }
    (out, stats)
}

/// Nominal under the head-POS rule when trees are attached: the mention
/// head is a common or proper noun. Without trees, fall back to the
/// surface rule: anything that is not itself a pronoun counts as nominal.
fn is_nominal(doc: &Document, m: Mention, pronouns: &PronounSet) -> bool {
    if doc.deps.is_some() {
        match mention_head(doc, m) {
            Some(h) => h.upos == "NOUN" || h.upos == "PROPN" || h.xpos.starts_with("NN"),
            None => false,
        }
    } else {
        !(m.start == m.end && doc.token(m.start).is_some_and(|t| pronouns.contains(t)))
    }
}

pub fn parse_instances_jsonl_str(text: &str, file: &str) -> Result<Vec<PcrInstance>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let inst: PcrInstance = serde_json::from_str(line)
            .map_err(|e| ParseError::line(file, i + 1, format!("bad instance record: {e}")))?;
        inst.check(file, i + 1)?;
        out.push(inst);
    }
    Ok(out)
}

pub fn serialize_instances_jsonl(instances: &[PcrInstance]) -> String {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&serde_json::to_string(inst).expect("instance serializes"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub choice: u8,
}

/// `{"instance_id": ..., "choice": 1|2}` per line; duplicates are errors.
pub fn parse_predictions_jsonl_str(
    text: &str,
    file: &str,
) -> Result<BTreeMap<String, u8>, ParseError> {
    #[derive(Deserialize)]
    struct Row {
        instance_id: String,
        choice: u8,
    }
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(line)
            .map_err(|e| ParseError::line(file, i + 1, format!("bad prediction record: {e}")))?;
        if row.choice != 1 && row.choice != 2 {
            return Err(ParseError::line(file, i + 1, format!("choice {} (want 1 or 2)", row.choice)));
        }
        if out.insert(row.instance_id.clone(), row.choice).is_some() {
            return Err(ParseError::line(file, i + 1, format!("duplicate prediction for {:?}", row.instance_id)));
        }
    }
    Ok(out)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PcrError {
    #[error("no instances")]
    NoInstances,
    #[error("prediction names unknown instance {0:?}")]
    UnknownInstance(String),
    #[error("no instances scored (all predictions missing)")]
    NothingScored,
}

/// z for a two-sided 90% interval.
pub const Z90: f64 = 1.6448536269514722;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PcrAccuracy {
    pub instances: usize,
    pub scored: usize,
    pub correct: usize,
    pub missing: usize,
    pub accuracy: f64,
    pub ci90_low: f64,
    pub ci90_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcrReport {
    pub overall: PcrAccuracy,
    pub per_dataset: BTreeMap<String, PcrAccuracy>,
    pub strict: bool,
}

/// Score a prediction map against instances. Missing predictions count as
/// wrong under `strict`, otherwise the instance is skipped (tallied in
/// `missing`). Predictions for unknown instance ids are an error.
pub fn score_predictions(
    instances: &[PcrInstance],
    predictions: &BTreeMap<String, u8>,
    strict: bool,
) -> Result<PcrReport, PcrError> {
    if instances.is_empty() {
        return Err(PcrError::NoInstances);
    }
    let known: std::collections::BTreeSet<&str> =
        instances.iter().map(|i| i.instance_id.as_str()).collect();
    if let Some(bad) = predictions.keys().find(|k| !known.contains(k.as_str())) {
        return Err(PcrError::UnknownInstance(bad.clone()));
    }

    #[derive(Default)]
    struct Tally {
        instances: usize,
        scored: usize,
        correct: usize,
        missing: usize,
    }
    impl Tally {
        fn accuracy(&self) -> PcrAccuracy {
            let acc = if self.scored == 0 { 0.0 } else { self.correct as f64 / self.scored as f64 };
            let (lo, hi) = wilson_interval(self.correct, self.scored, Z90);
            PcrAccuracy {
                instances: self.instances,
                scored: self.scored,
                correct: self.correct,
                missing: self.missing,
                accuracy: acc,
                ci90_low: lo,
                ci90_high: hi,
            }
        }
    }

    let mut overall = Tally::default();
    let mut per: BTreeMap<String, Tally> = BTreeMap::new();
    for inst in instances {
        let (scored, hit, missing) = match predictions.get(&inst.instance_id) {
            Some(c) => (true, *c == inst.gold, false),
            None if strict => (true, false, false),
            None => (false, false, true),
        };
        for tally in [&mut overall, per.entry(inst.dataset.clone()).or_default()] {
            tally.instances += 1;
            tally.scored += scored as usize;
            tally.correct += hit as usize;
            tally.missing += missing as usize;
        }
    }
    if overall.scored == 0 {
        return Err(PcrError::NothingScored);
    }
    Ok(PcrReport {
        overall: overall.accuracy(),
        per_dataset: per.into_iter().map(|(k, v)| (k, v.accuracy())).collect(),
        strict,
    })
}

/// Wilson score interval, clamped to [0, 1]; (0, 1) when n = 0.
pub fn wilson_interval(correct: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_ = n as f64;
    let p = correct as f64 / n_;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_;
    let center = (p + z2 / (2.0 * n_)) / denom;
    let half = z * (p * (1.0 - p) / n_ + z2 / (4.0 * n_ * n_)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Route to the supervised system only when its predicted cluster for the
/// pronoun has more than two mentions; otherwise trust the language model.
pub fn ensemble_select(supervised_choice: u8, lm_choice: u8, predicted_cluster_size: usize) -> u8 {
    if predicted_cluster_size > 2 {
        supervised_choice
    } else {
        lm_choice
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AssumptionOutcome {
    Holds,
    Violated,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub u_theta_challenge: f64,
    pub u_phi_challenge: f64,
    pub u_theta_reference: f64,
    pub u_phi_reference: f64,
    pub outcome: AssumptionOutcome,
}

/// Does the ordering of two models on the challenge set carry over to the
/// reference dataset? Ties on either side are indeterminate.
pub fn check_assumption(
    u_theta_challenge: f64,
    u_phi_challenge: f64,
    u_theta_reference: f64,
    u_phi_reference: f64,
) -> AssumptionCheck {
    let dc = u_theta_challenge - u_phi_challenge;
    let dd = u_theta_reference - u_phi_reference;
    let outcome = if dc == 0.0 || dd == 0.0 {
        AssumptionOutcome::Indeterminate
    } else if (dc > 0.0) == (dd > 0.0) {
        AssumptionOutcome::Holds
    } else {
        AssumptionOutcome::Violated
    };
    AssumptionCheck {
        u_theta_challenge,
        u_phi_challenge,
        u_theta_reference,
        u_phi_reference,
        outcome,
    }
}

#[cfg(test)]
mod tests;
