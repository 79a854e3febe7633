//! Entity-based CEAF with the phi4 similarity.
//!
//! phi4(K, R) = 2|K ∩ R| / (|K| + |R|). The score aligns key and response
//! entities one-to-one so the summed similarity is maximal; recall divides
//! that total by the number of key entities, precision by the number of
//! response entities.
//!
//! The alignment total is computed exactly: every phi4 value is a rational
//! with denominator |K| + |R|, so scaling by the least common multiple L of
//! the distinct denominators turns the matrix into integers. The matching
//! then runs in `i128` and the total is divided by L once at the end. If L
//! or a scaled weight would overflow (pathological entity-size mixes), the
//! weights fall back to a fixed-point scaling of the f64 similarities and
//! the total re-sums the unscaled similarities of the chosen alignment.

use std::collections::BTreeSet;

use super::b3::intersection_size;
use super::matching::max_weight_assignment;
use super::Components;
use crate::corpus::EntityPartition;

pub fn components(gold: &EntityPartition, pred: &EntityPartition) -> Components {
    let phi = similarity_total(gold, pred);
    Components {
        recall_num: phi,
        recall_den: gold.len() as f64,
        precision_num: phi,
        precision_den: pred.len() as f64,
    }
}

/// Maximum summed phi4 over one-to-one alignments of gold and predicted
/// entities.
pub fn similarity_total(gold: &EntityPartition, pred: &EntityPartition) -> f64 {
    if gold.is_empty() || pred.is_empty() {
        return 0.0;
    }
    exact_total(gold, pred).unwrap_or_else(|| fixed_point_total(gold, pred))
}

fn exact_total(gold: &EntityPartition, pred: &EntityPartition) -> Option<f64> {
    let mut denoms = BTreeSet::new();
    for k in gold.entities() {
        for r in pred.entities() {
            denoms.insert((k.len() + r.len()) as u128);
        }
    }
    let mut l: u128 = 1;
    for d in denoms {
        l = checked_lcm(l, d)?;
    }

    let n = gold.len().max(pred.len()) as u128;
    let mut weights = Vec::with_capacity(gold.len());
    for k in gold.entities() {
        let mut row = Vec::with_capacity(pred.len());
        for r in pred.entities() {
            let inter = intersection_size(k, r) as u128;
            let s = (k.len() + r.len()) as u128;
            let w = 2u128.checked_mul(inter)?.checked_mul(l / s)?;
            // The matching sums up to n of these; keep the total in range.
            if w > u128::MAX / 4 / n.max(1) || w > i128::MAX as u128 {
                return None;
            }
            row.push(w as i128);
        }
        weights.push(row);
    }
    let (total, _) = max_weight_assignment(&weights);
    Some(total as f64 / l as f64)
}

fn checked_lcm(a: u128, b: u128) -> Option<u128> {
    (a / gcd(a, b)).checked_mul(b)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn fixed_point_total(gold: &EntityPartition, pred: &EntityPartition) -> f64 {
    const SCALE: f64 = (1u64 << 40) as f64;
    let phi = |k: &Vec<_>, r: &Vec<_>| {
        2.0 * intersection_size(k, r) as f64 / (k.len() + r.len()) as f64
    };
    let weights: Vec<Vec<i128>> = gold
        .entities()
        .iter()
        .map(|k| {
            pred.entities()
                .iter()
                .map(|r| (phi(k, r) * SCALE).round() as i128)
                .collect()
        })
        .collect();
    let (_, assignment) = max_weight_assignment(&weights);
    let mut total = 0.0;
    for (i, a) in assignment.iter().enumerate() {
        if let Some(j) = *a {
            total += phi(&gold.entities()[i], &pred.entities()[j]);
        }
    }
    total
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
    fn alignment_picks_the_better_pairing() {
        // Gold {1 2 3} {4}; pred {1 2} {3 4}.
        // phi4: (3,{1 2}) = 4/5, (3,{3 4}) = 2/5, ({4},{1 2}) = 0,
        // ({4},{3 4}) = 2/3. Best total 4/5 + 2/3 = 22/15.
        let gold = part(&[&[1, 2, 3], &[4]]);
        let pred = part(&[&[1, 2], &[3, 4]]);
        let total = similarity_total(&gold, &pred);
        assert_eq!(total, 22.0 / 15.0);
        let s = components(&gold, &pred).score();
        assert_eq!(s.recall, (22.0 / 15.0) / 2.0);
        assert_eq!(s.precision, (22.0 / 15.0) / 2.0);
    }

    #[test]
    fn identical_partitions_score_one() {
        let gold = part(&[&[1, 2], &[3], &[4, 5, 6]]);
        let s = components(&gold, &gold).score();
        assert_eq!((s.recall, s.precision, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn disjoint_partitions_score_zero() {
        let gold = part(&[&[1, 2]]);
        let pred = part(&[&[3, 4]]);
        assert_eq!(similarity_total(&gold, &pred), 0.0);
    }

    #[test]
    fn fallback_total_matches_exact_total_when_both_apply() {
        let gold = part(&[&[1, 2, 3], &[4, 5], &[6]]);
        let pred = part(&[&[1, 4], &[2, 3, 6], &[5]]);
        let exact = exact_total(&gold, &pred).unwrap();
        let approx = fixed_point_total(&gold, &pred);
        assert!((exact - approx).abs() < 1e-9, "{exact} vs {approx}");
    }

    #[test]
    fn empty_side_scores_zero_total() {
        let gold = part(&[&[1, 2]]);
        let empty = part(&[]);
        assert_eq!(similarity_total(&gold, &empty), 0.0);
        let c = components(&gold, &empty);
        assert_eq!(c.precision_den, 0.0);
        assert!(c.score().degenerate);
    }
}
