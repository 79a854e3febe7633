//! Rooted hypernym DAGs.
//!
//! Edges arrive as TSV rows `child<TAB>parent`, senses as
//! `word<TAB>concept_id` (one row per sense, file order preserved per
//! word). Depth is the shortest path to the root, with the root at depth 1;
//! on a diamond the hypernym chain follows a shortest path, breaking ties
//! toward the lexicographically smallest parent.
//!
//! A minimum-depth filter mirrors corpora that discard overly abstract
//! concepts: chains are formed on the full DAG first and then re-spliced by
//! dropping every concept shallower than `min_depth`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ParseError;

#[derive(Clone, Debug)]
pub struct HierarchyOptions {
    /// Required when the edge file contains more than one parentless concept.
    pub root: Option<String>,
    /// Concepts with depth below this are removed from chains and from the
    /// surviving concept set. The root has depth 1, so 1 keeps everything.
    pub min_depth: usize,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        HierarchyOptions { root: None, min_depth: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hierarchy {
    /// child -> reachable parents, sorted. The root has an empty entry.
    parents: BTreeMap<String, Vec<String>>,
    root: String,
    /// Shortest-path depth from the root (root = 1).
    depth: BTreeMap<String, usize>,
    /// word -> sense concept ids in file order.
    senses: BTreeMap<String, Vec<String>>,
    min_depth: usize,
}

impl Hierarchy {
    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn min_depth(&self) -> usize {
        self.min_depth
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.depth.contains_key(concept)
    }

    pub fn depth_of(&self, concept: &str) -> Option<usize> {
        self.depth.get(concept).copied()
    }

    /// True when the concept exists and clears the minimum-depth filter.
    pub fn survives(&self, concept: &str) -> bool {
        self.depth_of(concept).is_some_and(|d| d >= self.min_depth)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.depth.keys().map(String::as_str)
    }

    pub fn parents_of(&self, concept: &str) -> &[String] {
        self.parents.get(concept).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Transitive parents of `concept`, excluding itself.
    pub fn ancestors_of(&self, concept: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut queue: VecDeque<&str> = self.parents_of(concept).iter().map(String::as_str).collect();
        while let Some(c) = queue.pop_front() {
            if out.insert(c.to_string()) {
                queue.extend(self.parents_of(c).iter().map(String::as_str));
            }
        }
        out
    }

    pub fn is_ancestor(&self, ancestor: &str, descendant: &str) -> bool {
        self.ancestors_of(descendant).contains(ancestor)
    }

    /// Hypernym chain from the root down to `concept` along a shortest
    /// path, with sub-`min_depth` concepts spliced out. The chain includes
    /// `concept` itself (unless filtered). `None` for unknown concepts.
    pub fn chain_of(&self, concept: &str) -> Option<Vec<String>> {
        let mut d = self.depth_of(concept)?;
        let mut chain = vec![concept.to_string()];
        let mut cur = concept.to_string();
        while cur != self.root {
            let next = self
                .parents_of(&cur)
                .iter()
                .find(|p| self.depth_of(p) == Some(d - 1))
                .expect("shortest-path parent exists by construction")
                .clone();
            chain.push(next.clone());
            cur = next;
            d -= 1;
        }
        chain.reverse();
        chain.retain(|c| self.depth_of(c).unwrap() >= self.min_depth);
        Some(chain)
    }

    /// Sense concepts of `word` in input order (empty when unknown).
    pub fn senses_of(&self, word: &str) -> &[String] {
        self.senses.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sense_words(&self) -> impl Iterator<Item = &str> {
        self.senses.keys().map(String::as_str)
    }

    /// Lemma of a concept id: the prefix before the first `.`, mirroring
    /// `dog.n.01` → `dog`; ids without a dot are their own lemma.
    pub fn lemma_of<'a>(&self, concept: &'a str) -> &'a str {
        match concept.split_once('.') {
            Some((head, _)) if !head.is_empty() => head,
            _ => concept,
        }
    }
}

pub fn parse_hierarchy(
    edges_path: &std::path::Path,
    senses_path: Option<&std::path::Path>,
    options: &HierarchyOptions,
) -> Result<(Hierarchy, Vec<String>), ParseError> {
    let edges = super::read_to_string(edges_path)?;
    let senses = senses_path.map(super::read_to_string).transpose()?;
    parse_hierarchy_str(
        &edges,
        &edges_path.display().to_string(),
        senses.as_deref(),
        &senses_path.map(|p| p.display().to_string()).unwrap_or_default(),
        options,
    )
}

pub fn parse_hierarchy_str(
    edges_text: &str,
    edges_file: &str,
    senses_text: Option<&str>,
    senses_file: &str,
    options: &HierarchyOptions,
) -> Result<(Hierarchy, Vec<String>), ParseError> {
    let mut warnings = Vec::new();
    let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut concepts: BTreeSet<String> = BTreeSet::new();

    for (i, line) in edges_text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let Some((child, parent)) = line.split_once('\t') else {
            return Err(ParseError::line(edges_file, lineno, "expected `child<TAB>parent`"));
        };
        if child.is_empty() || parent.is_empty() {
            return Err(ParseError::line(edges_file, lineno, "empty concept id"));
        }
        if child == parent {
            return Err(ParseError::line(edges_file, lineno, format!("self-loop on {child}")));
        }
        concepts.insert(child.to_string());
        concepts.insert(parent.to_string());
        parents.entry(child.to_string()).or_default().insert(parent.to_string());
    }
    if concepts.is_empty() {
        return Err(ParseError::file(edges_file, "no concepts"));
    }

    detect_cycle(&parents, edges_file)?;

    let parentless: Vec<&String> = concepts.iter().filter(|c| !parents.contains_key(*c)).collect();
    let root = match &options.root {
        Some(r) => {
            if !concepts.contains(r) {
                return Err(ParseError::file(edges_file, format!("declared root {r:?} does not occur in the edge file")));
            }
            r.clone()
        }
        None => match parentless.as_slice() {
            [only] => (*only).clone(),
            [] => return Err(ParseError::file(edges_file, "no parentless concept; declare a root explicitly")),
            many => {
                return Err(ParseError::file(
                    edges_file,
                    format!(
                        "multiple root candidates ({}); declare one with --root",
                        many.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                    ),
                ))
            }
        },
    };

    // Shortest-path depths by breadth-first search downward from the root.
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (child, ps) in &parents {
        for p in ps {
            children.entry(p.as_str()).or_default().push(child.as_str());
        }
    }
    let mut depth: BTreeMap<String, usize> = BTreeMap::new();
    depth.insert(root.clone(), 1);
    let mut queue = VecDeque::from([root.as_str()]);
    while let Some(c) = queue.pop_front() {
        let d = depth[c];
        for ch in children.get(c).into_iter().flatten() {
            if !depth.contains_key(*ch) {
                depth.insert((*ch).to_string(), d + 1);
                queue.push_back(ch);
            }
        }
    }
    let unreachable = concepts.len() - depth.len();
    if unreachable > 0 {
        warnings.push(format!("{edges_file}: dropped {unreachable} concept(s) not connected to root {root:?}"));
    }

    // Keep only reachable concepts and their reachable parents.
    let parents: BTreeMap<String, Vec<String>> = depth
        .keys()
        .map(|c| {
            let ps = parents
                .get(c)
                .map(|ps| ps.iter().filter(|p| depth.contains_key(*p)).cloned().collect())
                .unwrap_or_default();
            (c.clone(), ps)
        })
        .collect();

    let mut hierarchy = Hierarchy {
        parents,
        root,
        depth,
        senses: BTreeMap::new(),
        min_depth: options.min_depth.max(1),
    };

    if let Some(text) = senses_text {
        let mut dropped = 0usize;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if line.is_empty() {
                continue;
            }
            let Some((word, concept)) = line.split_once('\t') else {
                return Err(ParseError::line(senses_file, lineno, "expected `word<TAB>concept_id`"));
            };
            if word.is_empty() || concept.is_empty() {
                return Err(ParseError::line(senses_file, lineno, "empty field"));
            }
            if !hierarchy.survives(concept) {
                dropped += 1;
                continue;
            }
            hierarchy.senses.entry(word.to_string()).or_default().push(concept.to_string());
        }
        if dropped > 0 {
            warnings.push(format!("{senses_file}: dropped {dropped} sense row(s) naming unknown or filtered concepts"));
        }
    }

    Ok((hierarchy, warnings))
}

fn detect_cycle(parents: &BTreeMap<String, BTreeSet<String>>, file: &str) -> Result<(), ParseError> {
    // Kahn's algorithm over child -> parent edges.
    let mut out_degree: BTreeMap<&str, usize> = BTreeMap::new();
    let mut incoming: BTreeMap<&str, Vec<&str>> = BTreeMap::new(); // parent -> children
    for (child, ps) in parents {
        *out_degree.entry(child.as_str()).or_insert(0) += ps.len();
        for p in ps {
            out_degree.entry(p.as_str()).or_insert(0);
            incoming.entry(p.as_str()).or_default().push(child.as_str());
        }
    }
    let mut queue: VecDeque<&str> = out_degree.iter().filter(|(_, d)| **d == 0).map(|(c, _)| *c).collect();
    let mut seen = 0usize;
    while let Some(c) = queue.pop_front() {
        seen += 1;
        for ch in incoming.get(c).into_iter().flatten() {
            let d = out_degree.get_mut(ch).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(ch);
            }
        }
    }
    if seen < out_degree.len() {
        let stuck = out_degree.iter().find(|(_, d)| **d > 0).map(|(c, _)| *c).unwrap_or("?");
        return Err(ParseError::file(file, format!("cycle among concepts (e.g. involving {stuck})")));
    }
    Ok(())
}

/// Sorted `child<TAB>parent` rows over the retained DAG.
pub fn serialize_hierarchy_edges(h: &Hierarchy) -> String {
    let mut out = String::new();
    for (child, ps) in &h.parents {
        for p in ps {
            out.push_str(child);
            out.push('\t');
            out.push_str(p);
            out.push('\n');
        }
    }
    out
}

/// `word<TAB>concept` rows, words sorted, per-word sense order preserved.
pub fn serialize_senses(h: &Hierarchy) -> String {
    let mut out = String::new();
    for (word, concepts) in &h.senses {
        for c in concepts {
            out.push_str(word);
            out.push('\t');
            out.push_str(c);
            out.push('\n');
        }
    }
    out
}
