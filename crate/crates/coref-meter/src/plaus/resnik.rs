//! Selectional association over a concept hierarchy.
//!
//! A verb's object counts are smoothed upward through the hierarchy: every
//! object occurrence contributes `count / #senses` to each of its sense
//! concepts and all of their ancestors. The verb-conditional distributions
//! P(c|x) and the prior P(c) are normalized over the surviving concepts;
//! the prior pools the object occurrences of every verb.
//!
//! Selectional strength is the KL divergence (natural log) of P(c|x) from
//! the prior; selectional association is each concept's share of it, and an
//! event's score is the maximum association over the object's hypernyms.

use std::collections::BTreeMap;

use crate::corpus::Hierarchy;
use crate::corpus::TripleCounts;

use super::{ModelScore, PlausError};

/// A verb's strength must clear this to count as selective at all; below
/// it the association ratio divides by noise.
const SELSTR_EPS: f64 = 1e-12;

/// Verb-conditional and prior concept distributions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConceptDistribution {
    per_verb: BTreeMap<String, BTreeMap<String, f64>>,
    prior: BTreeMap<String, f64>,
    dropped: Vec<String>,
}

impl ConceptDistribution {
    /// Assembles a distribution from already-normalized tables; used for
    /// synthetic distributions in tests and diagnostics.
    pub fn from_parts(
        per_verb: BTreeMap<String, BTreeMap<String, f64>>,
        prior: BTreeMap<String, f64>,
    ) -> Self {
        ConceptDistribution { per_verb, prior, dropped: Vec::new() }
    }

    pub fn verbs(&self) -> impl Iterator<Item = &str> {
        self.per_verb.keys().map(String::as_str)
    }

    pub fn has_verb(&self, x: &str) -> bool {
        self.per_verb.contains_key(x)
    }

    pub fn concept_prob(&self, x: &str, c: &str) -> f64 {
        self.per_verb.get(x).and_then(|d| d.get(c)).copied().unwrap_or(0.0)
    }

    pub fn prior_prob(&self, c: &str) -> f64 {
        self.prior.get(c).copied().unwrap_or(0.0)
    }

    /// Objects that had no usable senses and were left out of the tables.
    pub fn dropped_objects(&self) -> &[String] {
        &self.dropped
    }

    /// KL(P(c|x) ‖ P(c)) in nats; `None` for verbs with no distribution.
    pub fn sel_strength(&self, x: &str) -> Option<f64> {
        let dist = self.per_verb.get(x)?;
        Some(
            dist.iter()
                .filter(|(_, &p)| p > 0.0)
                .map(|(c, &p)| p * (p / self.prior_prob(c)).ln())
                .sum(),
        )
    }

    /// Each concept's share of the verb's selectional strength. `None` for
    /// unknown verbs or strength too close to zero to divide by.
    pub fn sel_associations(&self, x: &str) -> Option<BTreeMap<String, f64>> {
        let strength = self.sel_strength(x)?;
        if strength <= SELSTR_EPS {
            return None;
        }
        let dist = self.per_verb.get(x)?;
        Some(
            dist.iter()
                .map(|(c, &p)| {
                    let term = if p > 0.0 { p * (p / self.prior_prob(c)).ln() } else { 0.0 };
                    (c.clone(), term / strength)
                })
                .collect(),
        )
    }
}

/// Builds verb-conditional and prior concept distributions from the
/// verb-object pair counts and the hierarchy's sense map.
///
/// Each (verb, object, count) spreads `count / #senses(object)` over every
/// sense concept and all of its ancestors that survive the depth filter.
/// Objects without senses are skipped and reported via
/// [`ConceptDistribution::dropped_objects`].
pub fn build_concept_distribution(counts: &TripleCounts, hierarchy: &Hierarchy) -> ConceptDistribution {
    let mut raw_per_verb: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut raw_prior: BTreeMap<String, f64> = BTreeMap::new();
    let mut dropped: Vec<String> = Vec::new();

    // Concept sets per object are reused across verbs.
    let mut concept_cache: BTreeMap<String, Option<Vec<(String, f64)>>> = BTreeMap::new();

    for (verb, object, count) in counts.iter_vo_pairs() {
        let spread = concept_cache
            .entry(object.to_string())
            .or_insert_with(|| spread_of(hierarchy, object));
        let Some(spread) = spread else {
            if !dropped.contains(&object.to_string()) {
                dropped.push(object.to_string());
            }
            continue;
        };
        let verb_dist = raw_per_verb.entry(verb.to_string()).or_default();
        for (c, share) in spread {
            let mass = count as f64 * *share;
            *verb_dist.entry(c.clone()).or_default() += mass;
            *raw_prior.entry(c.clone()).or_default() += mass;
        }
    }

    let per_verb = raw_per_verb.into_iter().map(|(v, d)| (v, normalize(d))).collect();
    let prior = normalize(raw_prior);
    ConceptDistribution { per_verb, prior, dropped }
}

/// Per-unit-count mass each concept receives from one occurrence of
/// `word`: 1/#senses at every sense concept and each of its surviving
/// ancestors. `None` when the word has no usable senses.
fn spread_of(hierarchy: &Hierarchy, word: &str) -> Option<Vec<(String, f64)>> {
    let senses = hierarchy.senses_of(word);
    if senses.is_empty() {
        return None;
    }
    let share = 1.0 / senses.len() as f64;
    let mut mass: BTreeMap<String, f64> = BTreeMap::new();
    for sense in senses {
        if hierarchy.survives(sense) {
            *mass.entry(sense.clone()).or_default() += share;
        }
        for anc in hierarchy.ancestors_of(sense) {
            if hierarchy.survives(&anc) {
                *mass.entry(anc).or_default() += share;
            }
        }
    }
    if mass.is_empty() {
        return None;
    }
    Some(mass.into_iter().collect())
}

fn normalize(dist: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let total: f64 = dist.values().sum();
    if total <= 0.0 {
        return dist;
    }
    dist.into_iter().map(|(c, m)| (c, m / total)).collect()
}

/// Scores verb `x` with object `y` as the maximum selectional association
/// over `y`'s sense concepts and their ancestors.
///
/// Unknown objects are an error (there is nothing to abstract over).
/// Verbs outside the distribution score 0 with an `unknown-verb` flag, and
/// verbs whose argument distribution matches the prior score 0 with an
/// `uninformative-verb` flag.
pub fn resnik_score(
    dist: &ConceptDistribution,
    hierarchy: &Hierarchy,
    x: &str,
    y: &str,
) -> Result<ModelScore, PlausError> {
    let senses = hierarchy.senses_of(y);
    if senses.is_empty() {
        return Err(PlausError::UnknownWord(y.to_string()));
    }
    let mut candidates: Vec<String> = Vec::new();
    for sense in senses {
        if hierarchy.survives(sense) {
            candidates.push(sense.clone());
        }
        candidates.extend(hierarchy.ancestors_of(sense).into_iter().filter(|c| hierarchy.survives(c)));
    }
    candidates.sort();
    candidates.dedup();
    if candidates.is_empty() {
        return Err(PlausError::UnknownWord(y.to_string()));
    }

    if !dist.has_verb(x) {
        return Ok(ModelScore::flagged(0.0, "unknown-verb"));
    }
    let strength = dist.sel_strength(x).expect("verb present");
    if strength <= SELSTR_EPS {
        return Ok(ModelScore::flagged(0.0, "uninformative-verb"));
    }
    let assoc = dist.sel_associations(x).expect("strength cleared the threshold");

    let mut best = f64::NEG_INFINITY;
    let mut any_mass = false;
    for c in &candidates {
        best = best.max(assoc.get(c).copied().unwrap_or(0.0));
        any_mass |= dist.concept_prob(x, c) > 0.0;
    }
    if !any_mass {
        return Ok(ModelScore::flagged(best, "no-overlap"));
    }
    Ok(ModelScore::defined(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_hierarchy_str, parse_triples_str, HierarchyOptions};

    fn toy_two_concepts() -> ConceptDistribution {
        let mut per_verb = BTreeMap::new();
        per_verb.insert(
            "eat".to_string(),
            BTreeMap::from([("c1".to_string(), 0.9), ("c2".to_string(), 0.1)]),
        );
        let prior = BTreeMap::from([("c1".to_string(), 0.5), ("c2".to_string(), 0.5)]);
        ConceptDistribution::from_parts(per_verb, prior)
    }

    #[test]
    fn toy_strength_and_association_match_hand_values() {
        let d = toy_two_concepts();
        let strength = d.sel_strength("eat").unwrap();
        let expected = 0.9 * (0.9f64 / 0.5).ln() + 0.1 * (0.1f64 / 0.5).ln();
        assert!((strength - expected).abs() < 1e-15);
        assert!((strength - 0.368).abs() < 1e-3);

        let assoc = d.sel_associations("eat").unwrap();
        let a1 = assoc["c1"];
        assert!((a1 - 0.9 * (1.8f64).ln() / expected).abs() < 1e-15);
        assert!((a1 - 1.437).abs() < 1e-3);
    }

    #[test]
    fn associations_sum_to_one() {
        let d = toy_two_concepts();
        let total: f64 = d.sel_associations("eat").unwrap().values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_verb_is_flagged_uninformative() {
        let mut per_verb = BTreeMap::new();
        per_verb.insert(
            "be".to_string(),
            BTreeMap::from([("c1".to_string(), 0.5), ("c2".to_string(), 0.5)]),
        );
        let prior = BTreeMap::from([("c1".to_string(), 0.5), ("c2".to_string(), 0.5)]);
        let d = ConceptDistribution::from_parts(per_verb, prior);
        assert!(d.sel_strength("be").unwrap().abs() <= 1e-12);
        assert!(d.sel_associations("be").is_none());
    }

    fn edges() -> &'static str {
        "animal\tentity\ndog.n.01\tanimal\ncat.n.01\tanimal\nrock.n.01\tentity\n"
    }

    fn senses() -> &'static str {
        "dog\tdog.n.01\ncat\tcat.n.01\nrock\trock.n.01\nstone\trock.n.01\nstone\tentity\n"
    }

    fn hierarchy() -> Hierarchy {
        let (h, warnings) =
            parse_hierarchy_str(edges(), "e", Some(senses()), "s", &HierarchyOptions::default()).unwrap();
        assert!(warnings.is_empty());
        h
    }

    #[test]
    fn single_sense_count_lands_on_whole_chain() {
        let h = hierarchy();
        let c = parse_triples_str("man\twalk\tdog\t2\n", "t", None).unwrap();
        let d = build_concept_distribution(&c, &h);
        // One sense, chain dog.n.01 -> animal -> entity: equal thirds.
        for concept in ["dog.n.01", "animal", "entity"] {
            assert!((d.concept_prob("walk", concept) - 1.0 / 3.0).abs() < 1e-12, "{concept}");
            assert!((d.prior_prob(concept) - 1.0 / 3.0).abs() < 1e-12, "{concept}");
        }
    }

    #[test]
    fn two_senses_split_the_count() {
        let h = hierarchy();
        // stone has senses rock.n.01 (chain rock.n.01, entity) and entity
        // (chain entity): raw mass rock.n.01 = 1/2, entity = 1/2 + 1/2 = 1.
        let c = parse_triples_str("man\tthrow\tstone\t4\n", "t", None).unwrap();
        let d = build_concept_distribution(&c, &h);
        assert!((d.concept_prob("throw", "rock.n.01") - 1.0 / 3.0).abs() < 1e-12);
        assert!((d.concept_prob("throw", "entity") - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn senseless_objects_are_dropped_and_reported() {
        let h = hierarchy();
        let c = parse_triples_str("man\teat\tdog\t1\nman\teat\tgravel\t5\n", "t", None).unwrap();
        let d = build_concept_distribution(&c, &h);
        assert_eq!(d.dropped_objects(), ["gravel"]);
        assert!(d.has_verb("eat"));
    }

    #[test]
    fn distributions_are_normalized() {
        let h = hierarchy();
        let c = parse_triples_str(
            "man\tpet\tdog\t3\nman\tpet\tcat\t2\nman\tthrow\trock\t5\nman\tthrow\tstone\t1\n",
            "t",
            None,
        )
        .unwrap();
        let d = build_concept_distribution(&c, &h);
        for v in ["pet", "throw"] {
            let total: f64 = ["dog.n.01", "cat.n.01", "rock.n.01", "animal", "entity"]
                .iter()
                .map(|c| d.concept_prob(v, c))
                .sum();
            assert!((total - 1.0).abs() < 1e-9, "{v} sums to {total}");
        }
        let prior: f64 = ["dog.n.01", "cat.n.01", "rock.n.01", "animal", "entity"]
            .iter()
            .map(|c| d.prior_prob(c))
            .sum();
        assert!((prior - 1.0).abs() < 1e-9);
    }

    #[test]
    fn score_picks_best_hypernym() {
        let h = hierarchy();
        let c = parse_triples_str(
            "man\tpet\tdog\t9\nman\tpet\tcat\t1\nman\tthrow\trock\t10\n",
            "t",
            None,
        )
        .unwrap();
        let d = build_concept_distribution(&c, &h);
        let s = resnik_score(&d, &h, "pet", "dog").unwrap();
        let best = s.value.unwrap();
        assert!(s.flags.is_empty());
        // The best hypernym cannot beat every per-concept association but
        // must equal one of them, and must be at least the dog.n.01 value.
        let assoc = d.sel_associations("pet").unwrap();
        assert!(best >= assoc["dog.n.01"] - 1e-15);
        assert!(["dog.n.01", "animal", "entity"].iter().any(|c| (assoc[*c] - best).abs() < 1e-15));
    }

    #[test]
    fn unknown_object_is_an_error() {
        let h = hierarchy();
        let c = parse_triples_str("man\tpet\tdog\t1\n", "t", None).unwrap();
        let d = build_concept_distribution(&c, &h);
        let err = resnik_score(&d, &h, "pet", "gravel").unwrap_err();
        assert!(matches!(err, PlausError::UnknownWord(w) if w == "gravel"));
    }

    #[test]
    fn unknown_verb_is_flagged_zero() {
        let h = hierarchy();
        let c = parse_triples_str("man\tpet\tdog\t1\n", "t", None).unwrap();
        let d = build_concept_distribution(&c, &h);
        let s = resnik_score(&d, &h, "hurl", "dog").unwrap();
        assert_eq!(s.value, Some(0.0));
        assert_eq!(s.flags, vec!["unknown-verb"]);
    }

    #[test]
    fn no_overlap_is_flagged() {
        // cat.n.01 and animal get mass from "pet"; rock.n.01 does not, and
        // the shared ancestor entity is removed by the depth filter, so the
        // rock candidates carry no mass at all.
        let (h2, _) = parse_hierarchy_str(
            edges(),
            "e",
            Some(senses()),
            "s",
            &HierarchyOptions { root: None, min_depth: 2 },
        )
        .unwrap();
        let c = parse_triples_str("man\tpet\tcat\t3\nman\tkeep\tdog\t1\n", "t", None).unwrap();
        let d = build_concept_distribution(&c, &h2);
        let s = resnik_score(&d, &h2, "pet", "rock").unwrap();
        assert_eq!(s.flags, vec!["no-overlap"]);
        assert_eq!(s.value, Some(0.0));
    }

    #[test]
    fn association_sums_to_one_for_built_distributions() {
        let h = hierarchy();
        let c = parse_triples_str(
            "man\tpet\tdog\t7\nman\tpet\tcat\t2\nman\tthrow\trock\t6\nman\tthrow\tstone\t3\n",
            "t",
            None,
        )
        .unwrap();
        let d = build_concept_distribution(&c, &h);
        for v in ["pet", "throw"] {
            if let Some(assoc) = d.sel_associations(v) {
                let total: f64 = assoc.values().sum();
                assert!((total - 1.0).abs() < 1e-9, "{v}: {total}");
            }
        }
    }
}
