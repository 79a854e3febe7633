//! Mention-based B-cubed score.
//!
//! Each key mention contributes |K ∩ R| / |K|, where K is its key entity
//! and R the response entity containing it (zero when absent from the
//! response); recall averages these over key mentions and precision swaps
//! the roles. The subset variant below restricts which mentions enter the
//! outer sums while leaving each per-mention term untouched, so the
//! unrestricted score is the filtered one with an always-true filter, term
//! for term in the same order.

use super::Components;
use crate::corpus::{EntityPartition, Mention};

pub fn components(gold: &EntityPartition, pred: &EntityPartition) -> Components {
    b3_components_filtered(gold, pred, |_| true, |_| true)
}

/// B-cubed components over mention subsets: `gold_keep` selects which gold
/// mentions contribute recall terms, `pred_keep` which predicted mentions
/// contribute precision terms.
pub fn b3_components_filtered(
    gold: &EntityPartition,
    pred: &EntityPartition,
    gold_keep: impl Fn(Mention) -> bool,
    pred_keep: impl Fn(Mention) -> bool,
) -> Components {
    let (recall_num, recall_den) = side(gold, pred, &gold_keep);
    let (precision_num, precision_den) = side(pred, gold, &pred_keep);
    Components { recall_num, recall_den, precision_num, precision_den }
}

fn side(
    key: &EntityPartition,
    response: &EntityPartition,
    keep: &impl Fn(Mention) -> bool,
) -> (f64, f64) {
    let index = response.entity_index();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for entity in key.entities() {
        for &m in entity {
            if !keep(m) {
                continue;
            }
            den += 1.0;
            if let Some(&ri) = index.get(&m) {
                let inter = intersection_size(entity, &response.entities()[ri]);
                num += inter as f64 / entity.len() as f64;
            }
        }
    }
    (num, den)
}

/// Size of the intersection of two sorted, duplicate-free mention lists.
pub(crate) fn intersection_size(a: &[Mention], b: &[Mention]) -> usize {
    let mut i = 0;
    let mut j = 0;
    let mut n = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
