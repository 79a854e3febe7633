//! Perturbed-event pair generation for pseudo-disambiguation.
//!
//! Each pair couples an attested event `e`, drawn proportional to its
//! triple count, with a perturbed event `e'` that keeps the verb and
//! replaces the subject, the object, or both. The replacement form is
//! chosen uniformly; replacement words are drawn by their frequency in the
//! matching position, redrawing any draw that reproduces the word it is
//! replacing. Every replaced position therefore really changes, `e' != e`
//! always, and the three forms stay uniform and identifiable in the
//! output stream.

use rand::Rng;

use crate::corpus::{Triple, TripleCounts};
use crate::seeding::rng_for;

use super::PlausError;

#[derive(Clone, Copy, Debug)]
pub struct PairGenOptions {
    /// Words occurring fewer times than this in a position are dropped
    /// from that position's pool, and triples containing them are never
    /// drawn as `e`.
    pub min_position_count: u64,
}

impl Default for PairGenOptions {
    fn default() -> Self {
        PairGenOptions { min_position_count: 1 }
    }
}

/// Word pool for one position: parallel word list and inclusive
/// cumulative counts for weighted draws.
struct Pool {
    words: Vec<String>,
    cum: Vec<u64>,
    total: u64,
}

impl Pool {
    fn build(table: &std::collections::BTreeMap<String, u64>, min: u64) -> Pool {
        let mut words = Vec::new();
        let mut cum = Vec::new();
        let mut total = 0u64;
        for (w, &n) in table {
            if n >= min {
                total += n;
                words.push(w.clone());
                cum.push(total);
            }
        }
        Pool { words, cum, total }
    }

    fn contains(&self, w: &str) -> bool {
        self.words.binary_search_by(|x| x.as_str().cmp(w)).is_ok()
    }

    fn draw(&self, rng: &mut impl Rng) -> &str {
        let x = rng.random_range(0..self.total);
        &self.words[self.cum.partition_point(|&c| c <= x)]
    }

    /// Weighted draw rejecting `avoid`; needs a second word in the pool.
    fn draw_not(&self, avoid: &str, rng: &mut impl Rng) -> &str {
        loop {
            let w = self.draw(rng);
            if w != avoid {
                return w;
            }
        }
    }
}

/// Generates `n` (event, perturbed event) pairs, deterministic per seed.
pub fn generate_pairs(
    counts: &TripleCounts,
    seed: u64,
    n: usize,
    opts: &PairGenOptions,
) -> Result<Vec<(Triple, Triple)>, PlausError> {
    let min = opts.min_position_count;
    let subjects = Pool::build(counts.subjects(), min);
    let objects = Pool::build(counts.objects(), min);

    let mut eligible: Vec<Triple> = Vec::new();
    let mut cum: Vec<u64> = Vec::new();
    let mut total = 0u64;
    for (t, c) in counts.iter_triples() {
        if counts.count_subject(&t.subject) >= min
            && counts.count_verb(&t.verb) >= min
            && counts.count_object(&t.object) >= min
        {
            total += c;
            eligible.push(t);
            cum.push(total);
        }
    }
    if eligible.is_empty() {
        return Err(PlausError::EmptyAfterFilter(min));
    }
    if subjects.words.len() < 2 || objects.words.len() < 2 {
        return Err(PlausError::TooSmallToPerturb);
    }
    debug_assert!(eligible.iter().all(|t| subjects.contains(&t.subject) && objects.contains(&t.object)));

    let mut rng = rng_for(seed, "plaus:pairs");
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.random_range(0..total);
        let e = &eligible[cum.partition_point(|&c| c <= x)];
        let form = rng.random_range(0..3u8);
        let perturbed = match form {
            0 => Triple::new(subjects.draw_not(&e.subject, &mut rng), e.verb.as_str(), e.object.as_str()),
            1 => Triple::new(e.subject.as_str(), e.verb.as_str(), objects.draw_not(&e.object, &mut rng)),
            _ => Triple::new(
                subjects.draw_not(&e.subject, &mut rng),
                e.verb.as_str(),
                objects.draw_not(&e.object, &mut rng),
            ),
        };
        out.push((e.clone(), perturbed));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_triples_str;

    fn counts(text: &str) -> TripleCounts {
        parse_triples_str(text, "t", None).unwrap()
    }

    #[test]
    fn same_seed_reproduces_the_stream() {
        let c = counts("a\tv\tb\t5\nc\tv\td\t3\ne\tw\tf\t2\n");
        let p1 = generate_pairs(&c, 42, 100, &PairGenOptions::default()).unwrap();
        let p2 = generate_pairs(&c, 42, 100, &PairGenOptions::default()).unwrap();
        assert_eq!(p1, p2);
        let p3 = generate_pairs(&c, 43, 100, &PairGenOptions::default()).unwrap();
        assert_ne!(p1, p3);
    }

    #[test]
    fn perturbed_event_always_differs_and_keeps_the_verb() {
        let c = counts("a\tv\tb\t5\nc\tv\td\t3\ne\tw\tf\t2\n");
        for (e, p) in generate_pairs(&c, 1, 500, &PairGenOptions::default()).unwrap() {
            assert_ne!(e, p);
            assert_eq!(e.verb, p.verb);
            // Changed positions only; unchanged ones match e exactly.
            assert!(p.subject != e.subject || p.object != e.object);
        }
    }

    #[test]
    fn single_alternative_is_forced() {
        // Drawing e is dominated by (a,v,b); whenever the subject is
        // perturbed the only alternative is c, and for the object, d.
        let c = counts("a\tv\tb\t50\nc\tv\td\t1\n");
        let pairs = generate_pairs(&c, 9, 300, &PairGenOptions::default()).unwrap();
        for (e, p) in pairs {
            if p.subject != e.subject {
                let expected = if e.subject == "a" { "c" } else { "a" };
                assert_eq!(p.subject, expected);
            }
            if p.object != e.object {
                let expected = if e.object == "b" { "d" } else { "b" };
                assert_eq!(p.object, expected);
            }
        }
    }

    #[test]
    fn events_are_drawn_by_triple_count() {
        let c = counts("a\tv\tb\t3\nc\tv\td\t1\n");
        let pairs = generate_pairs(&c, 5, 20_000, &PairGenOptions::default()).unwrap();
        let heavy = pairs.iter().filter(|(e, _)| e.subject == "a").count();
        let frac = heavy as f64 / 20_000.0;
        assert!((frac - 0.75).abs() < 0.02, "heavy fraction {frac}");
    }

    #[test]
    fn perturbation_forms_are_uniform() {
        let c = counts(
            "a\tv\tb\t4\nc\tv\td\t2\ne\tv\tf\t1\na\tw\td\t3\nc\tw\tf\t5\n",
        );
        let pairs = generate_pairs(&c, 77, 30_000, &PairGenOptions::default()).unwrap();
        let mut obs = [0u64; 3];
        for (e, p) in &pairs {
            let ds = p.subject != e.subject;
            let do_ = p.object != e.object;
            let k = match (ds, do_) {
                (true, false) => 0,
                (false, true) => 1,
                (true, true) => 2,
                (false, false) => unreachable!("degenerate pair"),
            };
            obs[k] += 1;
        }
        let expect = 10_000.0;
        let chi2: f64 = obs.iter().map(|&o| (o as f64 - expect).powi(2) / expect).sum();
        // Critical value for 2 degrees of freedom at p = 0.01.
        assert!(chi2 < 9.21, "chi2 {chi2} with counts {obs:?}");
    }

    #[test]
    fn frequency_filter_governs_pools_and_events() {
        // With a cutoff of 3, subject e (count 1) and object f (count 1)
        // leave the pools, and the (e,v,f) row cannot be drawn as e.
        let c = counts("a\tv\tb\t5\nc\tv\td\t3\ne\tv\tf\t1\n");
        let opts = PairGenOptions { min_position_count: 3 };
        let pairs = generate_pairs(&c, 3, 500, &opts).unwrap();
        for (e, p) in pairs {
            assert_ne!(e.subject, "e");
            assert_ne!(p.subject, "e");
            assert_ne!(p.object, "f");
        }
    }

    #[test]
    fn empty_filter_result_is_an_error() {
        let c = counts("a\tv\tb\t1\nc\tv\td\t1\n");
        let err = generate_pairs(&c, 0, 10, &PairGenOptions { min_position_count: 10 }).unwrap_err();
        assert!(matches!(err, PlausError::EmptyAfterFilter(10)));
        let err = generate_pairs(&TripleCounts::default(), 0, 10, &PairGenOptions::default()).unwrap_err();
        assert!(matches!(err, PlausError::EmptyAfterFilter(1)));
    }

    #[test]
    fn single_subject_vocabulary_is_an_error() {
        let c = counts("a\tv\tb\t5\na\tw\td\t5\n");
        let err = generate_pairs(&c, 0, 10, &PairGenOptions::default()).unwrap_err();
        assert!(matches!(err, PlausError::TooSmallToPerturb));
    }

    #[test]
    fn single_object_vocabulary_is_an_error() {
        let c = counts("a\tv\tb\t5\nc\tw\tb\t5\n");
        let err = generate_pairs(&c, 0, 10, &PairGenOptions::default()).unwrap_err();
        assert!(matches!(err, PlausError::TooSmallToPerturb));
    }
}
