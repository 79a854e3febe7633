//! Type-restricted scoring, generalization gaps, and significance tests.
//!
//! Per-type scores restrict the B-cubed outer sums to mentions carrying a
//! given type while leaving entity contexts whole, so a type carried by
//! every mention reproduces the unrestricted score bit for bit. Gap
//! reports compare two such reports (in-domain vs out-of-domain) on
//! B-cubed F1, the metric the per-type scores restrict.

pub mod permutation;

pub use permutation::{permutation_test_f1, permutation_test_mean, PermutationError};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{EntityPartition, Mention};
use crate::metrics::{b3_components_filtered, score_pairs, Components, CorefReport, MetricScore, ScoreOptions};
use crate::typing::{CoreferenceType, TypedMention};

/// Which types each mention carries. Mentions absent from the map count as
/// carrying none.
pub type TypeMap = BTreeMap<Mention, BTreeSet<CoreferenceType>>;

pub fn type_map(typed: &[TypedMention]) -> TypeMap {
    typed.iter().map(|t| (t.mention, t.types.clone())).collect()
}

/// B-cubed components summed only over mentions of type `t`. Entity
/// contexts (the per-mention intersection ratios) are unrestricted.
pub fn typed_b3_components(
    gold: &EntityPartition,
    pred: &EntityPartition,
    gold_types: &TypeMap,
    pred_types: &TypeMap,
    t: CoreferenceType,
) -> Components {
    fn keep(map: &TypeMap, t: CoreferenceType) -> impl Fn(Mention) -> bool + '_ {
        move |m| map.get(&m).is_some_and(|s| s.contains(&t))
    }
    b3_components_filtered(gold, pred, keep(gold_types, t), keep(pred_types, t))
}

/// One corpus-level type-restricted score plus how many mentions entered
/// each side of it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypedScore {
    pub score: MetricScore,
    pub gold_mentions: usize,
    pub pred_mentions: usize,
}

pub fn typed_b3(
    gold: &EntityPartition,
    pred: &EntityPartition,
    gold_types: &TypeMap,
    pred_types: &TypeMap,
    t: CoreferenceType,
) -> TypedScore {
    let c = typed_b3_components(gold, pred, gold_types, pred_types, t);
    TypedScore {
        score: c.score(),
        gold_mentions: c.recall_den as usize,
        pred_mentions: c.precision_den as usize,
    }
}

/// A scoring unit: one document's partitions with their type assignments.
#[derive(Clone, Debug)]
pub struct DisaggDoc {
    pub gold: EntityPartition,
    pub pred: EntityPartition,
    pub gold_types: TypeMap,
    pub pred_types: TypeMap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisaggReport {
    pub dataset_id: String,
    pub overall: CorefReport,
    /// Types with at least one typed mention on either side; micro-summed
    /// across documents.
    pub per_type: BTreeMap<CoreferenceType, TypedScore>,
}

pub fn disagg_report(dataset_id: &str, docs: &[DisaggDoc], options: &ScoreOptions) -> DisaggReport {
    let filtered: Vec<(EntityPartition, EntityPartition)> = docs
        .iter()
        .map(|d| {
            if options.keep_singletons {
                (d.gold.clone(), d.pred.clone())
            } else {
                (d.gold.without_singletons(), d.pred.without_singletons())
            }
        })
        .collect();
    let overall = score_pairs(&filtered, &ScoreOptions { keep_singletons: true, ..*options });

    let mut per_type = BTreeMap::new();
    for t in CoreferenceType::ALL {
        let mut total = Components::default();
        for (doc, (g, p)) in docs.iter().zip(&filtered) {
            total.add(&typed_b3_components(g, p, &doc.gold_types, &doc.pred_types, t));
        }
        if total.recall_den + total.precision_den > 0.0 {
            per_type.insert(
                t,
                TypedScore {
                    score: total.score(),
                    gold_mentions: total.recall_den as usize,
                    pred_mentions: total.precision_den as usize,
                },
            );
        }
    }

    DisaggReport {
        dataset_id: dataset_id.to_string(),
        // Report the requested singleton policy, not the pre-filtered one.
        overall: CorefReport { keep_singletons: options.keep_singletons, ..overall },
        per_type,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub in_domain: String,
    pub out_domain: String,
    /// |in-domain B-cubed F1 - out-of-domain B-cubed F1|.
    pub agg: f64,
    /// Per-type absolute F1 differences, for types present in both reports.
    pub tgg: BTreeMap<CoreferenceType, f64>,
    /// Types present in only one report.
    pub incomparable: Vec<CoreferenceType>,
    /// Types whose |TGG - AGG| exceeds the threshold.
    pub highlighted: Vec<CoreferenceType>,
    pub threshold: f64,
}

pub const DEFAULT_GAP_THRESHOLD: f64 = 0.10;

pub fn generalization_gap(
    in_domain: &DisaggReport,
    out_domain: &DisaggReport,
    threshold: f64,
) -> GapReport {
    let agg = (in_domain.overall.b3.f1 - out_domain.overall.b3.f1).abs();
    let mut tgg = BTreeMap::new();
    let mut incomparable = Vec::new();
    let mut highlighted = Vec::new();
    for t in CoreferenceType::ALL {
        match (in_domain.per_type.get(&t), out_domain.per_type.get(&t)) {
            (Some(a), Some(b)) => {
                let gap = (a.score.f1 - b.score.f1).abs();
                if (gap - agg).abs() > threshold {
                    highlighted.push(t);
                }
                tgg.insert(t, gap);
            }
            (None, None) => {}
            _ => incomparable.push(t),
        }
    }
    GapReport {
        in_domain: in_domain.dataset_id.clone(),
        out_domain: out_domain.dataset_id.clone(),
        agg,
        tgg,
        incomparable,
        highlighted,
        threshold,
    }
}
