//! Link-based MUC score.
//!
//! Recall counts, per key entity, the links recovered after partitioning
//! the entity by the response: an entity of size s split into q parts
//! (response entities plus one part per unmatched mention) recovers
//! s - q of its s - 1 links. Precision swaps the roles. All components are
//! integers, so aggregation is exact.

use std::collections::HashSet;

use super::Components;
use crate::corpus::EntityPartition;

pub fn components(gold: &EntityPartition, pred: &EntityPartition) -> Components {
    let (recall_num, recall_den) = side(gold, pred);
    let (precision_num, precision_den) = side(pred, gold);
    Components {
        recall_num: recall_num as f64,
        recall_den: recall_den as f64,
        precision_num: precision_num as f64,
        precision_den: precision_den as f64,
    }
}

fn side(key: &EntityPartition, response: &EntityPartition) -> (u64, u64) {
    let index = response.entity_index();
    let mut num = 0u64;
    let mut den = 0u64;
    for entity in key.entities() {
        let mut touched = HashSet::new();
        let mut unmatched = 0u64;
        for m in entity {
            match index.get(m) {
                Some(i) => {
                    touched.insert(*i);
                }
                None => unmatched += 1,
            }
        }
        let parts = touched.len() as u64 + unmatched;
        num += entity.len() as u64 - parts;
        den += entity.len() as u64 - 1;
    }
    (num, den)
}
