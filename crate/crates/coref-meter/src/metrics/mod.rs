//! Coreference metrics and the combined report.
//!
//! Each metric reduces a (gold, predicted) partition pair to four
//! [`Components`]: recall and precision numerators and denominators. Micro
//! aggregation sums components across documents before dividing once;
//! macro aggregation scores each document and averages the results.
//! Singleton entities are dropped from both sides before scoring unless
//! explicitly kept, matching common practice for corpora that do not
//! annotate singletons.
//!
//! Per-document work may run on a thread pool, but components are reduced
//! in document order, so reports are identical regardless of thread count.

pub mod b3;
pub mod ceaf;
pub mod matching;
pub mod muc;

pub use b3::b3_components_filtered;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::EntityPartition;

/// Recall and precision fractions before division.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
}

impl Components {
    pub fn add(&mut self, other: &Components) {
        self.recall_num += other.recall_num;
        self.recall_den += other.recall_den;
        self.precision_num += other.precision_num;
        self.precision_den += other.precision_den;
    }

    /// A zero denominator makes the ratio 0 and marks the score degenerate.
    pub fn score(&self) -> MetricScore {
        let degenerate = self.recall_den == 0.0 || self.precision_den == 0.0;
        let recall = if self.recall_den == 0.0 { 0.0 } else { self.recall_num / self.recall_den };
        let precision =
            if self.precision_den == 0.0 { 0.0 } else { self.precision_num / self.precision_den };
        let f1 = if recall + precision == 0.0 {
            0.0
        } else {
            2.0 * recall * precision / (recall + precision)
        };
        MetricScore { recall, precision, f1, degenerate }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    /// True when a denominator was zero (nothing to score on one side).
    pub degenerate: bool,
}

/// Per-document components for all three metrics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DocComponents {
    pub muc: Components,
    pub b3: Components,
    pub ceaf_e: Components,
}

impl DocComponents {
    pub fn add(&mut self, other: &DocComponents) {
        self.muc.add(&other.muc);
        self.b3.add(&other.b3);
        self.ceaf_e.add(&other.ceaf_e);
    }

    /// Macro building block: one document's scores.
    fn scores(&self) -> (MetricScore, MetricScore, MetricScore) {
        (self.muc.score(), self.b3.score(), self.ceaf_e.score())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Micro,
    Macro,
}

#[derive(Clone, Copy, Debug)]
pub struct ScoreOptions {
    pub keep_singletons: bool,
    pub aggregation: Aggregation,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions { keep_singletons: false, aggregation: Aggregation::Micro }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorefReport {
    pub muc: MetricScore,
    pub b3: MetricScore,
    pub ceaf_e: MetricScore,
    /// Unweighted mean of the three F1 values.
    pub conll_f1: f64,
    pub documents: usize,
    /// Mention counts after singleton handling, i.e. what was scored.
    pub gold_mentions: usize,
    pub pred_mentions: usize,
    pub keep_singletons: bool,
    pub aggregation: Aggregation,
    /// Similarity used for entity alignment in CEAF.
    pub ceaf_similarity: String,
}

/// Drop singletons if requested, then compute all three metrics' components.
pub fn doc_components(
    gold: &EntityPartition,
    pred: &EntityPartition,
    keep_singletons: bool,
) -> DocComponents {
    let (g, p);
    let (gold, pred) = if keep_singletons {
        (gold, pred)
    } else {
        g = gold.without_singletons();
        p = pred.without_singletons();
        (&g, &p)
    };
    DocComponents {
        muc: muc::components(gold, pred),
        b3: b3::components(gold, pred),
        ceaf_e: ceaf::components(gold, pred),
    }
}

pub fn score_pairs(pairs: &[(EntityPartition, EntityPartition)], options: &ScoreOptions) -> CorefReport {
    let filtered: Vec<(EntityPartition, EntityPartition)> = pairs
        .par_iter()
        .map(|(g, p)| {
            if options.keep_singletons {
                (g.clone(), p.clone())
            } else {
                (g.without_singletons(), p.without_singletons())
            }
        })
        .collect();
    let per_doc: Vec<DocComponents> = filtered
        .par_iter()
        .map(|(g, p)| doc_components(g, p, true)) // already filtered above
        .collect();

    let gold_mentions = filtered.iter().map(|(g, _)| g.mention_count()).sum();
    let pred_mentions = filtered.iter().map(|(_, p)| p.mention_count()).sum();

    let (muc, b3, ceaf_e) = match options.aggregation {
        Aggregation::Micro => {
            let mut total = DocComponents::default();
            for c in &per_doc {
                total.add(c);
            }
            total.scores()
        }
        Aggregation::Macro => {
            let scores: Vec<_> = per_doc.iter().map(DocComponents::scores).collect();
            (
                mean_score(scores.iter().map(|s| s.0)),
                mean_score(scores.iter().map(|s| s.1)),
                mean_score(scores.iter().map(|s| s.2)),
            )
        }
    };

    CorefReport {
        muc,
        b3,
        ceaf_e,
        conll_f1: (muc.f1 + b3.f1 + ceaf_e.f1) / 3.0,
        documents: pairs.len(),
        gold_mentions,
        pred_mentions,
        keep_singletons: options.keep_singletons,
        aggregation: options.aggregation,
        ceaf_similarity: "phi4".to_owned(),
    }
}

/// Arithmetic mean of per-document scores. The F1 field is the mean of
/// per-document F1s, not the harmonic mean of the averaged columns.
fn mean_score(scores: impl Iterator<Item = MetricScore>) -> MetricScore {
    let mut n = 0usize;
    let mut acc = MetricScore { recall: 0.0, precision: 0.0, f1: 0.0, degenerate: false };
    for s in scores {
        n += 1;
        acc.recall += s.recall;
        acc.precision += s.precision;
        acc.f1 += s.f1;
        acc.degenerate |= s.degenerate;
    }
    if n == 0 {
        return MetricScore { recall: 0.0, precision: 0.0, f1: 0.0, degenerate: true };
    }
    MetricScore {
        recall: acc.recall / n as f64,
        precision: acc.precision / n as f64,
        f1: acc.f1 / n as f64,
        degenerate: acc.degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Mention;

    fn part(entities: &[&[usize]]) -> EntityPartition {
        let raw = entities
            .iter()
            .map(|e| e.iter().map(|&i| Mention::new(i, i)).collect())
            .collect();
        EntityPartition::from_entities(raw).unwrap().0
    }

    #[test]
    fn singletons_dropped_by_default() {
        let gold = part(&[&[1, 2], &[3]]);
        let pred = part(&[&[1, 2], &[4]]);
        let report = score_pairs(&[(gold, pred)], &ScoreOptions::default());
        assert_eq!(report.gold_mentions, 2);
        assert_eq!(report.pred_mentions, 2);
        assert_eq!(report.muc.f1, 1.0);
        assert_eq!(report.conll_f1, 1.0);
    }

    #[test]
    fn keeping_singletons_changes_the_score() {
        let gold = part(&[&[1, 2], &[3]]);
        let pred = part(&[&[1, 2], &[4]]);
        let opts = ScoreOptions { keep_singletons: true, ..Default::default() };
        let report = score_pairs(&[(gold, pred)], &opts);
        assert_eq!(report.gold_mentions, 3);
        assert!(report.b3.recall < 1.0);
        assert!(report.ceaf_e.f1 < 1.0);
    }

    #[test]
    fn micro_sums_components_across_documents() {
        let d1 = (part(&[&[1, 2, 3, 4]]), part(&[&[1, 2], &[3, 4]]));
        let d2 = (part(&[&[1, 2]]), part(&[&[1, 2]]));
        let report = score_pairs(&[d1, d2], &ScoreOptions::default());
        // MUC recall: doc1 (4-2)/3, doc2 (2-1)/1 summed: 3/4.
        assert_eq!(report.muc.recall, 3.0 / 4.0);
        assert_eq!(report.documents, 2);
    }

    #[test]
    fn macro_averages_per_document_scores() {
        let d1 = (part(&[&[1, 2, 3, 4]]), part(&[&[1, 2], &[3, 4]]));
        let d2 = (part(&[&[1, 2]]), part(&[&[1, 2]]));
        let opts = ScoreOptions { aggregation: Aggregation::Macro, ..Default::default() };
        let report = score_pairs(&[d1, d2], &opts);
        assert_eq!(report.muc.recall, (2.0 / 3.0 + 1.0) / 2.0);
    }

    #[test]
    fn empty_input_is_degenerate() {
        let report = score_pairs(&[], &ScoreOptions::default());
        assert!(report.muc.degenerate);
        assert_eq!(report.conll_f1, 0.0);
        assert_eq!(report.documents, 0);
    }

    #[test]
    fn f1_is_harmonic_mean() {
        let c = Components { recall_num: 1.0, recall_den: 2.0, precision_num: 1.0, precision_den: 1.0 };
        let s = c.score();
        assert_eq!(s.f1, 2.0 * 0.5 * 1.0 / 1.5);
        assert!(!s.degenerate);
    }
}
