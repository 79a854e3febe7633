//! Count-based plausibility models over subject-verb-object corpora.
//!
//! Five scorers share the [`ModelScore`] result shape: a bigram conditional
//! estimate, pointwise mutual information, selectional association over a
//! concept hierarchy ([`resnik`]), a role-conditioned conditional model, and
//! an exemplar-similarity model over word vectors ([`exemplar`]).
//! [`pairs`] generates perturbed-event pairs for pseudo-disambiguation
//! training sets.
//!
//! Zero-count fallbacks never smooth: a model either reports a raw MLE
//! value, reports 0 with a flag naming the fallback, or reports an
//! undefined value (`None`) where 0 would be misleading (PMI, exemplar).

pub mod exemplar;
pub mod pairs;
pub mod resnik;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Triple, TripleCounts};

pub use exemplar::{cosine, exemplar_score, parse_word_vectors_str, seen_objects, WordVectors};
pub use pairs::{generate_pairs, PairGenOptions};
pub use resnik::{build_concept_distribution, resnik_score, ConceptDistribution};

/// One model's verdict on one event.
///
/// `value: None` means the model cannot produce a number at all (for PMI a
/// zero count, for the exemplar model an empty seen set); this is distinct
/// from a defined score of 0. Flags name any fallback that fired.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub value: Option<f64>,
    pub flags: Vec<String>,
}

impl ModelScore {
    pub fn defined(value: f64) -> Self {
        ModelScore { value: Some(value), flags: Vec::new() }
    }

    pub fn flagged(value: f64, flag: &str) -> Self {
        ModelScore { value: Some(value), flags: vec![flag.to_string()] }
    }

    pub fn undefined(flag: &str) -> Self {
        ModelScore { value: None, flags: vec![flag.to_string()] }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }
}

#[derive(Debug, Error)]
pub enum PlausError {
    #[error("word {0:?} has no senses in the hierarchy")]
    UnknownWord(String),
    #[error("no vector for word {0:?}")]
    MissingVector(String),
    #[error("no triples survive the positional frequency filter (min count {0})")]
    EmptyAfterFilter(u64),
    #[error("vocabulary too small to perturb: need two distinct subjects and two distinct objects after the frequency filter")]
    TooSmallToPerturb,
}

/// Estimates P(s,o|v) as Count(s,v)·Count(v,o)/Count(v)².
///
/// Both pair counts are bounded by the verb count, so the value lies in
/// [0,1]. An unseen verb scores 0 with an `unseen-verb` flag.
pub fn ngram_score(counts: &TripleCounts, t: &Triple) -> ModelScore {
    let cv = counts.count_verb(&t.verb);
    if cv == 0 {
        return ModelScore::flagged(0.0, "unseen-verb");
    }
    let csv = counts.count_sv(&t.subject, &t.verb) as f64;
    let cvo = counts.count_vo(&t.verb, &t.object) as f64;
    let cv = cv as f64;
    ModelScore::defined(csv * cvo / (cv * cv))
}

/// Which pair table a PMI co-occurrence count is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRelation {
    SubjectVerb,
    VerbObject,
}

/// Pointwise mutual information ln(P(x,y)/(P(x)·P(y))).
///
/// Unigram probabilities use occurrences in any position over the corpus
/// word total N; the pair count sums both argument orders so the result is
/// symmetric in (x,y). Any zero count makes the log undefined, reported as
/// `value: None` rather than 0 (a defined 0 means exact independence).
pub fn pmi(counts: &TripleCounts, x: &str, y: &str, relation: PairRelation) -> ModelScore {
    let cxy = match relation {
        PairRelation::SubjectVerb => counts.count_sv(x, y) + counts.count_sv(y, x),
        PairRelation::VerbObject => counts.count_vo(x, y) + counts.count_vo(y, x),
    };
    let cx = counts.count_word(x);
    let cy = counts.count_word(y);
    if cxy == 0 || cx == 0 || cy == 0 {
        return ModelScore::undefined("zero-count");
    }
    let n = counts.n_words() as f64;
    ModelScore::defined((cxy as f64 * n / (cx as f64 * cy as f64)).ln())
}

/// Role-conditioned conditional estimate P(y|r,x)·P(r|x) from the role
/// tables. An unseen (role, predicate) pair scores 0 with a flag.
pub fn pado_score(counts: &TripleCounts, x: &str, y: &str, role: &str) -> ModelScore {
    let crx = counts.count_role_pair(x, role);
    if crx == 0 {
        return ModelScore::flagged(0.0, "unseen-role");
    }
    let cx = counts.count_role_predicate(x);
    let cyrx = counts.count_role(x, role, y);
    ModelScore::defined((cyrx as f64 / crx as f64) * (crx as f64 / cx as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_triples_str;
    use rand::Rng;

    fn counts(text: &str) -> TripleCounts {
        parse_triples_str(text, "t", None).unwrap()
    }

    #[test]
    fn ngram_hand_case_one_sixth() {
        // Count(man,eat)=2, Count(eat,pear)=3, Count(eat)=6.
        let c = counts("man\teat\tapple\t2\ndog\teat\tpear\t3\ncow\teat\tgrass\t1\n");
        let s = ngram_score(&c, &Triple::new("man", "eat", "pear"));
        assert_eq!(s.value, Some(1.0 / 6.0));
        assert!(s.flags.is_empty());
    }

    #[test]
    fn ngram_unseen_verb_is_flagged_zero() {
        let c = counts("man\teat\tapple\t2\n");
        let s = ngram_score(&c, &Triple::new("man", "devour", "apple"));
        assert_eq!(s.value, Some(0.0));
        assert_eq!(s.flags, vec!["unseen-verb"]);
    }

    #[test]
    fn ngram_upper_bound_is_one() {
        let c = counts("man\teat\tapple\t7\n");
        let s = ngram_score(&c, &Triple::new("man", "eat", "apple"));
        assert_eq!(s.value, Some(1.0));
    }

    #[test]
    fn ngram_stays_in_unit_interval_on_random_corpora() {
        let mut rng = crate::seeding::rng_for(11, "test:ngram-range");
        let vocab = ["a", "b", "c", "d", "e"];
        for _ in 0..200 {
            let mut c = TripleCounts::default();
            for _ in 0..rng.random_range(1..10) {
                let s = vocab[rng.random_range(0..5)];
                let v = vocab[rng.random_range(0..5)];
                let o = vocab[rng.random_range(0..5)];
                c.add(Triple::new(s, v, o), rng.random_range(1..20));
            }
            let t = Triple::new(
                vocab[rng.random_range(0..5)],
                vocab[rng.random_range(0..5)],
                vocab[rng.random_range(0..5)],
            );
            let s = ngram_score(&c, &t).value.unwrap();
            assert!((0.0..=1.0).contains(&s), "{s} out of range for {t}");
        }
    }

    #[test]
    fn pmi_hand_case_is_ln_ten() {
        // Count(man,eat)=10, Count(man)=12, Count(eat)=10, N=120:
        // 10·120/(12·10) = 10.
        let c = counts("man\teat\tapple\t10\nman\tsee\ttree\t2\ndog\tchase\tcat\t28\n");
        assert_eq!(c.n_words(), 120);
        let s = pmi(&c, "man", "eat", PairRelation::SubjectVerb);
        assert_eq!(s.value, Some(std::f64::consts::LN_10));
    }

    #[test]
    fn pmi_independence_is_exactly_zero() {
        // Count(a,v)=1, Count(a)=6, Count(v)=6, N=36: ratio exactly 1.
        let c = counts("a\tv\tb\t1\na\tp\tq\t5\nr\tv\ts\t5\nf\tg\th\t1\n");
        assert_eq!(c.n_words(), 36);
        let s = pmi(&c, "a", "v", PairRelation::SubjectVerb);
        assert_eq!(s.value, Some(0.0));
    }

    #[test]
    fn pmi_zero_count_is_undefined_not_zero() {
        let c = counts("man\teat\tapple\t3\n");
        let s = pmi(&c, "man", "pear", PairRelation::VerbObject);
        assert_eq!(s.value, None);
        assert_eq!(s.flags, vec!["zero-count"]);
    }

    #[test]
    fn pmi_is_symmetric_on_random_tables() {
        let mut rng = crate::seeding::rng_for(7, "test:pmi-symmetry");
        let vocab = ["a", "b", "c", "d"];
        for _ in 0..1000 {
            let mut c = TripleCounts::default();
            for _ in 0..rng.random_range(1..8) {
                let s = vocab[rng.random_range(0..4)];
                let v = vocab[rng.random_range(0..4)];
                let o = vocab[rng.random_range(0..4)];
                c.add(Triple::new(s, v, o), rng.random_range(1..9));
            }
            let x = vocab[rng.random_range(0..4)];
            let y = vocab[rng.random_range(0..4)];
            for rel in [PairRelation::SubjectVerb, PairRelation::VerbObject] {
                let a = pmi(&c, x, y, rel);
                let b = pmi(&c, y, x, rel);
                assert_eq!(a.value, b.value, "pmi({x},{y}) != pmi({y},{x})");
            }
        }
    }

    #[test]
    fn pado_hand_case_is_quarter() {
        // Count(apple,patient,eat)=2, Count(patient,eat)=4, Count(eat)=8.
        let mut c = TripleCounts::default();
        c.add_role("eat".into(), "patient".into(), "apple".into(), 2);
        c.add_role("eat".into(), "patient".into(), "pear".into(), 2);
        c.add_role("eat".into(), "agent".into(), "man".into(), 4);
        let s = pado_score(&c, "eat", "apple", "patient");
        assert_eq!(s.value, Some(0.25));
        assert!(s.flags.is_empty());
    }

    #[test]
    fn pado_sums_to_one_over_complete_tables() {
        let mut c = TripleCounts::default();
        c.add_role("eat".into(), "patient".into(), "apple".into(), 3);
        c.add_role("eat".into(), "patient".into(), "pear".into(), 1);
        c.add_role("eat".into(), "agent".into(), "man".into(), 2);
        c.add_role("eat".into(), "agent".into(), "dog".into(), 6);
        let total: f64 = [("patient", "apple"), ("patient", "pear"), ("agent", "man"), ("agent", "dog")]
            .iter()
            .map(|(r, y)| pado_score(&c, "eat", y, r).value.unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pado_unseen_role_is_flagged_zero() {
        let mut c = TripleCounts::default();
        c.add_role("eat".into(), "patient".into(), "apple".into(), 2);
        let s = pado_score(&c, "eat", "apple", "instrument");
        assert_eq!(s.value, Some(0.0));
        assert_eq!(s.flags, vec!["unseen-role"]);
    }

    #[test]
    fn model_score_serializes_none_as_null() {
        let j = serde_json::to_string(&ModelScore::undefined("zero-count")).unwrap();
        assert_eq!(j, r#"{"value":null,"flags":["zero-count"]}"#);
        let j = serde_json::to_string(&ModelScore::defined(0.5)).unwrap();
        assert_eq!(j, r#"{"value":0.5,"flags":[]}"#);
    }
}
