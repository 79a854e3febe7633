//! Subject-verb-object count corpora.
//!
//! Triples arrive as TSV rows `s<TAB>v<TAB>o<TAB>count`; duplicate rows are
//! summed. [`TripleCounts`] derives every marginal the plausibility models
//! need: pair counts (s,v) and (v,o), positional unigram counts, per-word
//! totals across positions, and the corpus word total N.
//!
//! Role-conditioned counts (for the role model, `P(y|r,x)·P(r|x)`) come
//! from a separate TSV `predicate<TAB>role<TAB>argument<TAB>count`; the
//! predicate total there is the sum over its roles, so complete tables
//! sum to one over (argument, role).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ParseError;

/// One subject-verb-object event.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub verb: String,
    pub object: String,
}

impl Triple {
    pub fn new(s: impl Into<String>, v: impl Into<String>, o: impl Into<String>) -> Self {
        Triple { subject: s.into(), verb: v.into(), object: o.into() }
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.verb, self.object)
    }
}

/// Aggregated counts over a triple corpus, plus optional role tables.
///
/// Serializes as the raw triple and role rows; the marginal tables are
/// rebuilt on deserialization.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "TripleCountsWire", into = "TripleCountsWire")]
pub struct TripleCounts {
    triples: BTreeMap<(String, String, String), u64>,
    pair_sv: BTreeMap<(String, String), u64>,
    pair_vo: BTreeMap<(String, String), u64>,
    subjects: BTreeMap<String, u64>,
    verbs: BTreeMap<String, u64>,
    objects: BTreeMap<String, u64>,
    words: BTreeMap<String, u64>,
    n_words: u64,
    /// (predicate, role, argument) -> count
    roles: BTreeMap<(String, String, String), u64>,
    role_pairs: BTreeMap<(String, String), u64>,
    role_predicates: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct TripleCountsWire {
    triples: Vec<(String, String, String, u64)>,
    roles: Vec<(String, String, String, u64)>,
}

impl From<TripleCountsWire> for TripleCounts {
    fn from(w: TripleCountsWire) -> Self {
        let triples = w.triples.into_iter().map(|(s, v, o, n)| ((s, v, o), n)).collect();
        let roles = w.roles.into_iter().map(|(x, r, y, n)| ((x, r, y), n)).collect();
        TripleCounts::rebuild(triples, roles)
    }
}

impl From<TripleCounts> for TripleCountsWire {
    fn from(c: TripleCounts) -> Self {
        TripleCountsWire {
            triples: c.triples.into_iter().map(|((s, v, o), n)| (s, v, o, n)).collect(),
            roles: c.roles.into_iter().map(|((x, r, y), n)| (x, r, y, n)).collect(),
        }
    }
}

impl TripleCounts {
    pub fn add(&mut self, triple: Triple, count: u64) {
        let Triple { subject, verb, object } = triple;
        *self.pair_sv.entry((subject.clone(), verb.clone())).or_default() += count;
        *self.pair_vo.entry((verb.clone(), object.clone())).or_default() += count;
        *self.subjects.entry(subject.clone()).or_default() += count;
        *self.verbs.entry(verb.clone()).or_default() += count;
        *self.objects.entry(object.clone()).or_default() += count;
        *self.words.entry(subject.clone()).or_default() += count;
        *self.words.entry(verb.clone()).or_default() += count;
        *self.words.entry(object.clone()).or_default() += count;
        self.n_words += 3 * count;
        *self.triples.entry((subject, verb, object)).or_default() += count;
    }

    pub fn add_role(&mut self, predicate: String, role: String, argument: String, count: u64) {
        *self.role_pairs.entry((predicate.clone(), role.clone())).or_default() += count;
        *self.role_predicates.entry(predicate.clone()).or_default() += count;
        *self.roles.entry((predicate, role, argument)).or_default() += count;
    }

    /// Recomputes the derived tables from the raw triple and role maps;
    /// needed after deserialization, which carries only the raw maps.
    pub fn rebuild(raw_triples: BTreeMap<(String, String, String), u64>, raw_roles: BTreeMap<(String, String, String), u64>) -> Self {
        let mut c = TripleCounts::default();
        for ((s, v, o), n) in raw_triples {
            c.add(Triple::new(s, v, o), n);
        }
        for ((x, r, y), n) in raw_roles {
            c.add_role(x, r, y, n);
        }
        c
    }

    /// Clamps every triple count to `cap`, rebuilding the marginals.
    pub fn cap_per_triple(self, cap: u64) -> Self {
        let capped = self.triples.into_iter().map(|(k, v)| (k, v.min(cap))).collect();
        Self::rebuild(capped, self.roles)
    }

    pub fn triple_count(&self, t: &Triple) -> u64 {
        self.triples
            .get(&(t.subject.clone(), t.verb.clone(), t.object.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn count_sv(&self, s: &str, v: &str) -> u64 {
        self.pair_sv.get(&(s.to_string(), v.to_string())).copied().unwrap_or(0)
    }

    pub fn count_vo(&self, v: &str, o: &str) -> u64 {
        self.pair_vo.get(&(v.to_string(), o.to_string())).copied().unwrap_or(0)
    }

    pub fn count_subject(&self, w: &str) -> u64 {
        self.subjects.get(w).copied().unwrap_or(0)
    }

    pub fn count_verb(&self, w: &str) -> u64 {
        self.verbs.get(w).copied().unwrap_or(0)
    }

    pub fn count_object(&self, w: &str) -> u64 {
        self.objects.get(w).copied().unwrap_or(0)
    }

    /// Occurrences of `w` summed over all three positions.
    pub fn count_word(&self, w: &str) -> u64 {
        self.words.get(w).copied().unwrap_or(0)
    }

    /// Total number of word occurrences (three per triple occurrence).
    pub fn n_words(&self) -> u64 {
        self.n_words
    }

    pub fn total_triples(&self) -> u64 {
        self.triples.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter_triples(&self) -> impl Iterator<Item = (Triple, u64)> + '_ {
        self.triples
            .iter()
            .map(|((s, v, o), n)| (Triple::new(s.clone(), v.clone(), o.clone()), *n))
    }

    pub fn iter_vo_pairs(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.pair_vo.iter().map(|((v, o), n)| (v.as_str(), o.as_str(), *n))
    }

    pub fn subjects(&self) -> &BTreeMap<String, u64> {
        &self.subjects
    }

    pub fn objects(&self) -> &BTreeMap<String, u64> {
        &self.objects
    }

    pub fn count_role(&self, predicate: &str, role: &str, argument: &str) -> u64 {
        self.roles
            .get(&(predicate.to_string(), role.to_string(), argument.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn count_role_pair(&self, predicate: &str, role: &str) -> u64 {
        self.role_pairs.get(&(predicate.to_string(), role.to_string())).copied().unwrap_or(0)
    }

    /// Predicate total in the role tables (sum over roles and arguments).
    pub fn count_role_predicate(&self, predicate: &str) -> u64 {
        self.role_predicates.get(predicate).copied().unwrap_or(0)
    }

    pub fn has_roles(&self) -> bool {
        !self.roles.is_empty()
    }
}

fn parse_count_field(field: &str, file: &str, lineno: usize, col: usize) -> Result<u64, ParseError> {
    let n: u64 = field
        .parse()
        .map_err(|_| ParseError::cell(file, lineno, col, format!("count {field:?} is not a non-negative integer")))?;
    if n == 0 {
        return Err(ParseError::cell(file, lineno, col, "count must be at least 1"));
    }
    Ok(n)
}

fn check_lemma(field: &str, file: &str, lineno: usize, col: usize) -> Result<(), ParseError> {
    if field.is_empty() {
        return Err(ParseError::cell(file, lineno, col, "empty lemma"));
    }
    if field.chars().any(char::is_whitespace) {
        return Err(ParseError::cell(file, lineno, col, format!("lemma {field:?} contains whitespace")));
    }
    Ok(())
}

pub fn parse_triples(path: &std::path::Path, cap_per_triple: Option<u64>) -> Result<TripleCounts, ParseError> {
    let text = super::read_to_string(path)?;
    parse_triples_str(&text, &path.display().to_string(), cap_per_triple)
}

pub fn parse_triples_str(text: &str, file: &str, cap_per_triple: Option<u64>) -> Result<TripleCounts, ParseError> {
    let mut counts = TripleCounts::default();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(ParseError::line(file, lineno, format!("expected 4 tab-separated fields, found {}", cols.len())));
        }
        for (ci, c) in cols[..3].iter().enumerate() {
            check_lemma(c, file, lineno, ci + 1)?;
        }
        let n = parse_count_field(cols[3], file, lineno, 4)?;
        counts.add(Triple::new(cols[0], cols[1], cols[2]), n);
    }
    if let Some(cap) = cap_per_triple {
        counts = counts.cap_per_triple(cap);
    }
    Ok(counts)
}

/// Reads `predicate<TAB>role<TAB>argument<TAB>count` rows into `counts`.
pub fn parse_role_triples_str(text: &str, file: &str, counts: &mut TripleCounts) -> Result<(), ParseError> {
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(ParseError::line(file, lineno, format!("expected 4 tab-separated fields, found {}", cols.len())));
        }
        for (ci, c) in cols[..3].iter().enumerate() {
            check_lemma(c, file, lineno, ci + 1)?;
        }
        let n = parse_count_field(cols[3], file, lineno, 4)?;
        counts.add_role(cols[0].to_string(), cols[1].to_string(), cols[2].to_string(), n);
    }
    Ok(())
}

/// Sorted TSV, one aggregated row per triple, trailing newline.
pub fn serialize_triples(counts: &TripleCounts) -> String {
    let mut out = String::new();
    for (t, n) in counts.iter_triples() {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", t.subject, t.verb, t.object, n));
    }
    out
}

pub fn serialize_roles(counts: &TripleCounts) -> String {
    let mut out = String::new();
    for ((x, r, y), n) in &counts.roles {
        out.push_str(&format!("{x}\t{r}\t{y}\t{n}\n"));
    }
    out
}
