//! Rule-based classification of mentions into contested coreference
//! constructions, driven by aligned dependency trees.
//!
//! The four types are independent predicates; a mention can satisfy
//! several at once:
//!
//! - nested: the mention corefers with an overlapping, unequal span (both
//!   sides of the overlap are flagged);
//! - on_generic: the mention head has an indefinite determiner child
//!   (lemma `a`/`an`), or has no determiner child at all and is a plural
//!   noun;
//! - compound: the mention head is itself the dependent of a
//!   `compound`-family relation;
//! - copular: the mention and a coreferring mention are linked head-to-head
//!   by `nsubj`, and the rightmost of the two heads governs a `cop`
//!   dependency (predicate-nominal constructions flag both sides).
//!
//! The mention head is the leftmost token in the span whose dependency
//! head falls outside the span (the root's head, 0, counts as outside).
//! Documents without dependency trees produce untyped results with a
//! reason, never a guess.
//!
//! The bare-plural half of the generic rule deliberately ignores
//! possessives ("their plans" counts as generic); how often that happens
//! is tallied separately so the effect of the rule can be audited.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{DepToken, DependencyTree, Document, EntityPartition, Mention};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreferenceType {
    Nested,
    OnGeneric,
    Compound,
    Copular,
}

impl CoreferenceType {
    pub const ALL: [CoreferenceType; 4] = [
        CoreferenceType::Nested,
        CoreferenceType::OnGeneric,
        CoreferenceType::Compound,
        CoreferenceType::Copular,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CoreferenceType::Nested => "nested",
            CoreferenceType::OnGeneric => "on_generic",
            CoreferenceType::Compound => "compound",
            CoreferenceType::Copular => "copular",
        }
    }

    pub fn from_name(name: &str) -> Option<CoreferenceType> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl std::fmt::Display for CoreferenceType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypedMention {
    pub mention: Mention,
    pub types: BTreeSet<CoreferenceType>,
    /// One human-readable fact per assigned type (at least).
    pub evidence: Vec<String>,
    /// Reason classification was impossible; `types` is empty when set.
    pub untyped: Option<String>,
}

impl TypedMention {
    fn untyped(mention: Mention, reason: impl Into<String>) -> Self {
        TypedMention { mention, types: BTreeSet::new(), evidence: Vec::new(), untyped: Some(reason.into()) }
    }
}

#[derive(Clone, Debug)]
pub struct TypingConfig {
    /// Language-specific part-of-speech tags that mark plural nouns.
    pub plural_xpos: BTreeSet<String>,
    /// Also accept the `Number=Plur` morphological feature.
    pub use_ud_plural: bool,
}

impl Default for TypingConfig {
    fn default() -> Self {
        TypingConfig {
            plural_xpos: ["NNS", "NNPS"].into_iter().map(String::from).collect(),
            use_ud_plural: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TypingStats {
    pub mentions: usize,
    pub untyped: usize,
    pub per_type: BTreeMap<CoreferenceType, usize>,
    /// Bare-plural generics whose head also governs a possessive: the rule
    /// counted them as generic anyway; this tracks how often.
    pub plural_generic_with_possessive: usize,
}

pub fn classify_mention(
    doc: &Document,
    partition: &EntityPartition,
    m: Mention,
    cfg: &TypingConfig,
) -> TypedMention {
    classify_with_stats(doc, partition, m, cfg).0
}

fn classify_with_stats(
    doc: &Document,
    partition: &EntityPartition,
    m: Mention,
    cfg: &TypingConfig,
) -> (TypedMention, bool) {
    let Some(trees) = doc.deps.as_ref() else {
        return (TypedMention::untyped(m, "no dependency trees for document"), false);
    };
    let coreferring = partition.coreferring(m);
    if coreferring.is_empty() && !partition.entity_index().contains_key(&m) {
        return (TypedMention::untyped(m, "mention not in partition"), false);
    }
    let Some(site) = MentionSite::locate(doc, trees, m) else {
        return (TypedMention::untyped(m, "mention not aligned to a single sentence"), false);
    };

    let mut types = BTreeSet::new();
    let mut evidence = Vec::new();
    let mut plural_with_poss = false;

    for other in &coreferring {
        if m.overlaps(other) {
            types.insert(CoreferenceType::Nested);
            evidence.push(format!("nested: overlaps coreferring mention {other}"));
            break;
        }
    }

    let head = site.head;
    let det_children: Vec<&DepToken> =
        site.tree.children_of(head.id).filter(|c| c.deprel_base() == "det").collect();
    let indefinite = det_children.iter().find(|c| {
        let l = c.lemma.to_lowercase();
        l == "a" || l == "an"
    });
    if let Some(det) = indefinite {
        types.insert(CoreferenceType::OnGeneric);
        evidence.push(format!("on_generic: indefinite determiner {:?}", det.form));
    } else if det_children.is_empty() && is_plural(head, cfg) {
        types.insert(CoreferenceType::OnGeneric);
        evidence.push(format!("on_generic: bare plural head {:?}/{}", head.form, head.xpos));
        if site.tree.children_of(head.id).any(|c| c.deprel.contains("poss")) {
            plural_with_poss = true;
        }
    }

    if head.deprel_base() == "compound" {
        types.insert(CoreferenceType::Compound);
        evidence.push(format!("compound: head {:?} attaches via {}", head.form, head.deprel));
    }

    for other in &coreferring {
        let Some(other_site) = MentionSite::locate(doc, trees, *other) else { continue };
        if other_site.sentence != site.sentence {
            continue;
        }
        let (h, oh) = (site.head, other_site.head);
        let linked = (h.deprel_base() == "nsubj" && h.head == oh.id)
            || (oh.deprel_base() == "nsubj" && oh.head == h.id);
        if !linked {
            continue;
        }
        let rightmost = if h.id >= oh.id { h } else { oh };
        if site.tree.children_of(rightmost.id).any(|c| c.deprel_base() == "cop") {
            types.insert(CoreferenceType::Copular);
            evidence.push(format!(
                "copular: nsubj link with {other}; cop under rightmost head {:?}",
                rightmost.form
            ));
            break;
        }
    }

    (TypedMention { mention: m, types, evidence, untyped: None }, plural_with_poss)
}

fn is_plural(tok: &DepToken, cfg: &TypingConfig) -> bool {
    cfg.plural_xpos.contains(&tok.xpos) || (cfg.use_ud_plural && tok.has_feat("Number", "Plur"))
}

/// Classify every mention of the partition, in span order.
pub fn type_partition(
    doc: &Document,
    partition: &EntityPartition,
    cfg: &TypingConfig,
) -> (Vec<TypedMention>, TypingStats) {
    let mut mentions: Vec<Mention> = partition.mentions().collect();
    mentions.sort();
    let mut stats = TypingStats::default();
    let mut out = Vec::with_capacity(mentions.len());
    for m in mentions {
        let (tm, plural_with_poss) = classify_with_stats(doc, partition, m, cfg);
        stats.mentions += 1;
        if tm.untyped.is_some() {
            stats.untyped += 1;
        }
        for t in &tm.types {
            *stats.per_type.entry(*t).or_insert(0) += 1;
        }
        if plural_with_poss {
            stats.plural_generic_with_possessive += 1;
        }
        out.push(tm);
    }
    (out, stats)
}

/// Head token of a mention under the leftmost-external-head rule, when
/// dependency trees are attached.
pub fn mention_head(doc: &Document, m: Mention) -> Option<&DepToken> {
    let trees = doc.deps.as_ref()?;
    MentionSite::locate(doc, trees, m).map(|s| s.head)
}

/// A mention pinned to its sentence tree and head token.
struct MentionSite<'a> {
    tree: &'a DependencyTree,
    sentence: usize,
    head: &'a DepToken,
}

impl<'a> MentionSite<'a> {
    fn locate(doc: &Document, trees: &'a [DependencyTree], m: Mention) -> Option<MentionSite<'a>> {
        let sentence = doc.sentence_of(m.start)?;
        if doc.sentence_of(m.end) != Some(sentence) {
            return None;
        }
        let tree = trees.get(sentence)?;
        let range = doc.sentence_ranges().get(sentence)?.clone();
        // 1-based ids within the sentence.
        let lo = m.start - range.start + 1;
        let hi = m.end - range.start + 1;
        let head = (lo..=hi)
            .filter_map(|id| tree.token(id))
            .find(|t| t.head < lo || t.head > hi)?;
        Some(MentionSite { tree, sentence, head })
    }
}
