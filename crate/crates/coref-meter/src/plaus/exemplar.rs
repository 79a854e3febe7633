//! Exemplar-similarity scoring over word vectors.
//!
//! An object is plausible for a verb to the degree that its vector is
//! cosine-similar to the objects already attested with that verb, each
//! exemplar weighted by its attestation frequency.

use std::collections::BTreeMap;

use crate::corpus::{ParseError, TripleCounts};

use super::{ModelScore, PlausError};

/// Fixed-dimension vectors keyed by word, read from TSV rows
/// `word<TAB>x1<TAB>x2...`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WordVectors {
    dim: usize,
    vecs: BTreeMap<String, Vec<f64>>,
}

impl WordVectors {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vecs.get(word).map(Vec::as_slice)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.vecs.keys().map(String::as_str)
    }
}

pub fn parse_word_vectors(path: &std::path::Path) -> Result<WordVectors, ParseError> {
    let text = crate::corpus::read_to_string(path)?;
    parse_word_vectors_str(&text, &path.display().to_string())
}

pub fn parse_word_vectors_str(text: &str, file: &str) -> Result<WordVectors, ParseError> {
    let mut out = WordVectors::default();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let word = cols.next().unwrap_or("");
        if word.is_empty() {
            return Err(ParseError::line(file, lineno, "empty word"));
        }
        let mut vec = Vec::new();
        for (ci, c) in cols.enumerate() {
            let x: f64 = c.parse().map_err(|_| {
                ParseError::cell(file, lineno, ci + 2, format!("component {c:?} is not a number"))
            })?;
            if !x.is_finite() {
                return Err(ParseError::cell(file, lineno, ci + 2, "component is not finite"));
            }
            vec.push(x);
        }
        if vec.is_empty() {
            return Err(ParseError::line(file, lineno, "vector has no components"));
        }
        if out.dim == 0 {
            out.dim = vec.len();
        } else if vec.len() != out.dim {
            return Err(ParseError::line(
                file,
                lineno,
                format!("expected {} components, found {}", out.dim, vec.len()),
            ));
        }
        if vec.iter().all(|&x| x == 0.0) {
            return Err(ParseError::line(file, lineno, format!("word {word:?} has a zero vector")));
        }
        if out.vecs.insert(word.to_string(), vec).is_some() {
            return Err(ParseError::line(file, lineno, format!("duplicate word {word:?}")));
        }
    }
    Ok(out)
}

/// Sorted TSV, deterministic float formatting, trailing newline.
pub fn serialize_word_vectors(vectors: &WordVectors) -> String {
    let mut out = String::new();
    for (w, v) in &vectors.vecs {
        out.push_str(w);
        for x in v {
            out.push('\t');
            out.push_str(&format!("{x}"));
        }
        out.push('\n');
    }
    out
}

/// Cosine similarity, clamped to [-1, 1] against rounding excursions.
/// Identical inputs give exactly 1 because the normalizer is then
/// `sqrt(d·d) = d`.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    (dot / (na * nb).sqrt()).clamp(-1.0, 1.0)
}

/// The verb's attested objects with their attestation frequencies, in
/// deterministic (alphabetical) order.
pub fn seen_objects(counts: &TripleCounts, verb: &str) -> Vec<(String, u64)> {
    counts
        .iter_vo_pairs()
        .filter(|(v, _, _)| *v == verb)
        .map(|(_, o, n)| (o.to_string(), n))
        .collect()
}

/// Frequency-weighted mean cosine similarity of `y` to the exemplars.
///
/// An empty exemplar set leaves the score undefined; a missing vector for
/// `y` or any exemplar is an error because the similarity itself is
/// meaningless without it.
pub fn exemplar_score(
    vectors: &WordVectors,
    seen: &[(String, u64)],
    y: &str,
) -> Result<ModelScore, PlausError> {
    if seen.is_empty() {
        return Ok(ModelScore::undefined("no-exemplars"));
    }
    let vy = vectors.get(y).ok_or_else(|| PlausError::MissingVector(y.to_string()))?;
    let z: u64 = seen.iter().map(|(_, w)| w).sum();
    let mut score = 0.0;
    for (exemplar, weight) in seen {
        let ve = vectors.get(exemplar).ok_or_else(|| PlausError::MissingVector(exemplar.clone()))?;
        score += (*weight as f64 / z as f64) * cosine(vy, ve);
    }
    Ok(ModelScore::defined(score))
}
