//! The in-memory document model: tokens, mentions, entity partitions.

use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::conllu::DependencyTree;

/// Contiguous token span with inclusive, document-global endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
}

impl Mention {
    pub fn new(start: usize, end: usize) -> Self {
        Mention { start, end }
    }

    /// Number of tokens covered; inclusive endpoints, so never zero.
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false // inclusive spans cover at least one token
    }

    pub fn is_ordered(&self) -> bool {
        self.start <= self.end
    }

    pub fn overlaps(&self, other: &Mention) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl std::fmt::Display for Mention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PartitionError {
    #[error("mention {0} has start > end")]
    Unordered(Mention),
    #[error("mention {0} appears in more than one entity")]
    NotDisjoint(Mention),
}

/// Family of disjoint, non-empty mention sets.
///
/// Canonical form: mentions sorted within each entity, entities sorted by
/// their first mention. Singleton entities are legal here; scoring applies
/// its own singleton policy via [`EntityPartition::without_singletons`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EntityPartition {
    entities: Vec<Vec<Mention>>,
}

impl EntityPartition {
    /// Builds the canonical partition. Duplicate spans inside one entity are
    /// dropped (the returned count says how many); the same span in two
    /// entities breaks disjointness and is an error. Empty entity lists are
    /// skipped.
    pub fn from_entities(raw: Vec<Vec<Mention>>) -> Result<(Self, usize), PartitionError> {
        let mut deduped = 0usize;
        let mut entities = Vec::with_capacity(raw.len());
        for mut entity in raw {
            if entity.is_empty() {
                continue;
            }
            for m in &entity {
                if !m.is_ordered() {
                    return Err(PartitionError::Unordered(*m));
                }
            }
            entity.sort();
            let before = entity.len();
            entity.dedup();
            deduped += before - entity.len();
            entities.push(entity);
        }
        entities.sort();
        let part = EntityPartition { entities };
        if let Some(dup) = part.first_cross_entity_duplicate() {
            return Err(PartitionError::NotDisjoint(dup));
        }
        Ok((part, deduped))
    }

    fn first_cross_entity_duplicate(&self) -> Option<Mention> {
        let mut seen = HashMap::new();
        for (i, entity) in self.entities.iter().enumerate() {
            for m in entity {
                if let Some(prev) = seen.insert(*m, i) {
                    if prev != i {
                        return Some(*m);
                    }
                }
            }
        }
        None
    }

    pub fn entities(&self) -> &[Vec<Mention>] {
        &self.entities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn mention_count(&self) -> usize {
        self.entities.iter().map(Vec::len).sum()
    }

    pub fn mentions(&self) -> impl Iterator<Item = Mention> + '_ {
        self.entities.iter().flatten().copied()
    }

    /// Partition with every entity of fewer than two mentions removed.
    pub fn without_singletons(&self) -> EntityPartition {
        EntityPartition {
            entities: self.entities.iter().filter(|e| e.len() >= 2).cloned().collect(),
        }
    }

    /// Map from mention to the index of its entity.
    pub fn entity_index(&self) -> HashMap<Mention, usize> {
        let mut idx = HashMap::with_capacity(self.mention_count());
        for (i, entity) in self.entities.iter().enumerate() {
            for m in entity {
                idx.insert(*m, i);
            }
        }
        idx
    }

    /// Mentions of the entity containing `m`, excluding `m` itself.
    /// Empty when `m` is not in the partition or is a singleton.
    pub fn coreferring(&self, m: Mention) -> Vec<Mention> {
        for entity in &self.entities {
            if entity.contains(&m) {
                return entity.iter().copied().filter(|x| *x != m).collect();
            }
        }
        Vec::new()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("{doc}: mention {mention} out of range (document has {tokens} tokens)")]
    OutOfRange { doc: String, mention: Mention, tokens: usize },
    #[error("{doc}: mention {mention} crosses a sentence boundary")]
    CrossSentence { doc: String, mention: Mention },
    #[error("{doc}: speaker rows do not match sentence shape")]
    SpeakerShape { doc: String },
    #[error("{doc}: {got} dependency trees for {want} sentences")]
    DepCount { doc: String, got: usize, want: usize },
    #[error("{doc}: sentence {sentence}: tree has {got} tokens, sentence has {want}")]
    DepTokens { doc: String, sentence: usize, got: usize, want: usize },
    #[error("{doc}: sentence {sentence}, token {index}: document says {doc_token:?}, tree says {tree_form:?}")]
    DepForm { doc: String, sentence: usize, index: usize, doc_token: String, tree_form: String },
    #[error("{doc}: {err}")]
    Partition { doc: String, err: PartitionError },
}

/// One annotated document: sentences of surface tokens, optional per-token
/// speakers, gold and (optionally) predicted entity partitions, optional
/// dependency trees aligned one per sentence.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub genre: Option<String>,
    pub sentences: Vec<Vec<String>>,
    pub speakers: Option<Vec<Vec<String>>>,
    pub gold: EntityPartition,
    pub predicted: Option<EntityPartition>,
    pub deps: Option<Vec<DependencyTree>>,
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    /// Global token ranges, one per sentence.
    pub fn sentence_ranges(&self) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(self.sentences.len());
        let mut at = 0;
        for s in &self.sentences {
            out.push(at..at + s.len());
            at += s.len();
        }
        out
    }

    /// Index of the sentence containing global token `tok`.
    pub fn sentence_of(&self, tok: usize) -> Option<usize> {
        let mut at = 0;
        for (i, s) in self.sentences.iter().enumerate() {
            at += s.len();
            if tok < at {
                return Some(i);
            }
        }
        None
    }

    pub fn token(&self, mut idx: usize) -> Option<&str> {
        for s in &self.sentences {
            if idx < s.len() {
                return Some(&s[idx]);
            }
            idx -= s.len();
        }
        None
    }

    pub fn span_text(&self, m: Mention) -> String {
        (m.start..=m.end)
            .filter_map(|i| self.token(i))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn speaker_of(&self, mut idx: usize) -> Option<&str> {
        let speakers = self.speakers.as_ref()?;
        for s in speakers {
            if idx < s.len() {
                return Some(&s[idx]);
            }
            idx -= s.len();
        }
        None
    }

    /// Checks span bounds, sentence containment, speaker shape and (when
    /// present) dependency alignment.
    pub fn validate(&self) -> Result<(), DocumentError> {
        let tokens = self.token_count();
        let ranges = self.sentence_ranges();
        let within_one_sentence = |m: &Mention| ranges.iter().any(|r| r.contains(&m.start) && r.contains(&m.end));
        let mut all: Vec<Mention> = self.gold.mentions().collect();
        if let Some(pred) = &self.predicted {
            all.extend(pred.mentions());
        }
        for m in all {
            if m.end >= tokens {
                return Err(DocumentError::OutOfRange { doc: self.doc_id.clone(), mention: m, tokens });
            }
            if !within_one_sentence(&m) {
                return Err(DocumentError::CrossSentence { doc: self.doc_id.clone(), mention: m });
            }
        }
        if let Some(speakers) = &self.speakers {
            let ok = speakers.len() == self.sentences.len()
                && speakers.iter().zip(&self.sentences).all(|(a, b)| a.len() == b.len());
            if !ok {
                return Err(DocumentError::SpeakerShape { doc: self.doc_id.clone() });
            }
        }
        if let Some(trees) = &self.deps {
            self.check_alignment(trees)?;
        }
        Ok(())
    }

    fn check_alignment(&self, trees: &[DependencyTree]) -> Result<(), DocumentError> {
        if trees.len() != self.sentences.len() {
            return Err(DocumentError::DepCount {
                doc: self.doc_id.clone(),
                got: trees.len(),
                want: self.sentences.len(),
            });
        }
        for (si, (tree, sent)) in trees.iter().zip(&self.sentences).enumerate() {
            if tree.tokens.len() != sent.len() {
                return Err(DocumentError::DepTokens {
                    doc: self.doc_id.clone(),
                    sentence: si,
                    got: tree.tokens.len(),
                    want: sent.len(),
                });
            }
            for (ti, (tok, form)) in sent.iter().zip(tree.tokens.iter().map(|t| &t.form)).enumerate() {
                if tok != form {
                    return Err(DocumentError::DepForm {
                        doc: self.doc_id.clone(),
                        sentence: si,
                        index: ti,
                        doc_token: tok.clone(),
                        tree_form: form.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Attaches dependency trees after verifying identical tokenization.
    /// Misaligned inputs are rejected rather than repaired.
    pub fn attach_deps(&mut self, trees: Vec<DependencyTree>) -> Result<(), DocumentError> {
        self.check_alignment(&trees)?;
        self.deps = Some(trees);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: usize, e: usize) -> Mention {
        Mention::new(s, e)
    }

    #[test]
    fn partition_canonicalizes_and_counts_dups() {
        let (p, dups) = EntityPartition::from_entities(vec![
            vec![m(3, 4), m(0, 1), m(3, 4)],
            vec![m(2, 2)],
            vec![],
        ])
        .unwrap();
        assert_eq!(dups, 1);
        assert_eq!(p.entities(), &[vec![m(0, 1), m(3, 4)], vec![m(2, 2)]]);
        assert_eq!(p.mention_count(), 3);
    }

    #[test]
    fn partition_rejects_cross_entity_duplicate() {
        let err = EntityPartition::from_entities(vec![vec![m(0, 1), m(2, 2)], vec![m(2, 2), m(5, 6)]]);
        assert!(matches!(err, Err(PartitionError::NotDisjoint(d)) if d == m(2, 2)));
    }

    #[test]
    fn singleton_filter_keeps_only_real_entities() {
        let (p, _) = EntityPartition::from_entities(vec![vec![m(0, 0), m(2, 2)], vec![m(4, 4)]]).unwrap();
        let f = p.without_singletons();
        assert_eq!(f.len(), 1);
        assert_eq!(f.mention_count(), 2);
    }

    #[test]
    fn document_rejects_cross_sentence_span() {
        let (gold, _) = EntityPartition::from_entities(vec![vec![m(1, 3), m(0, 0)]]).unwrap();
        let doc = Document {
            doc_id: "d".into(),
            sentences: vec![vec!["a".into(), "b".into()], vec!["c".into(), "d".into()]],
            gold,
            ..Default::default()
        };
        assert!(matches!(doc.validate(), Err(DocumentError::CrossSentence { .. })));
    }

    #[test]
    fn document_lookup_helpers() {
        let doc = Document {
            doc_id: "d".into(),
            sentences: vec![vec!["a".into(), "b".into()], vec!["c".into()]],
            speakers: Some(vec![vec!["s1".into(), "s1".into()], vec!["s2".into()]]),
            ..Default::default()
        };
        assert_eq!(doc.token_count(), 3);
        assert_eq!(doc.sentence_of(2), Some(1));
        assert_eq!(doc.token(2), Some("c"));
        assert_eq!(doc.span_text(m(0, 1)), "a b");
        assert_eq!(doc.speaker_of(2), Some("s2"));
        assert_eq!(doc.sentence_of(3), None);
    }
}
