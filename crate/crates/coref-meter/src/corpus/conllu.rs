//! CoNLL-U dependency trees.
//!
//! Ten tab-separated columns per token line:
//! `ID FORM LEMMA UPOS XPOS FEATS HEAD DEPREL DEPS MISC`, sentences
//! separated by blank lines. Multiword-token ranges (`1-2`) and empty nodes
//! (`1.1`) are skipped; comment lines (`#`) are skipped. Head indices are
//! 1-based within the sentence with 0 marking the root; each sentence must
//! have exactly one root and no head cycles.

use serde::{Deserialize, Serialize};

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepToken {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl DepToken {
    /// True when FEATS contains `key=value` (features are `|`-separated).
    pub fn has_feat(&self, key: &str, value: &str) -> bool {
        self.feats
            .split('|')
            .filter_map(|kv| kv.split_once('='))
            .any(|(k, v)| k == key && v == value)
    }

    /// The relation label up to any subtype, e.g. `compound:prt` → `compound`.
    pub fn deprel_base(&self) -> &str {
        self.deprel.split(':').next().unwrap_or(&self.deprel)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyTree {
    pub tokens: Vec<DepToken>,
}

impl DependencyTree {
    /// Token by 1-based id.
    pub fn token(&self, id: usize) -> Option<&DepToken> {
        if id == 0 {
            return None;
        }
        self.tokens.get(id - 1)
    }

    /// 1-based id of the root token.
    pub fn root_id(&self) -> usize {
        self.tokens.iter().find(|t| t.head == 0).map(|t| t.id).unwrap_or(0)
    }

    /// Tokens whose head is `id`.
    pub fn children_of(&self, id: usize) -> impl Iterator<Item = &DepToken> {
        self.tokens.iter().filter(move |t| t.head == id)
    }
}

pub fn parse_conllu(path: &std::path::Path) -> Result<Vec<DependencyTree>, ParseError> {
    let text = super::read_to_string(path)?;
    parse_conllu_str(&text, &path.display().to_string())
}

pub fn parse_conllu_str(text: &str, file: &str) -> Result<Vec<DependencyTree>, ParseError> {
    let mut trees = Vec::new();
    let mut current: Vec<DepToken> = Vec::new();
    let mut sentence_start_line = 1usize;

    let mut flush = |current: &mut Vec<DepToken>, line: usize, start: usize| -> Result<(), ParseError> {
        if current.is_empty() {
            return Ok(());
        }
        let tree = DependencyTree { tokens: std::mem::take(current) };
        validate_tree(&tree, file, start, line)?;
        trees.push(tree);
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            flush(&mut current, lineno, sentence_start_line)?;
            sentence_start_line = lineno + 1;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ParseError::line(file, lineno, format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        // Multiword-token ranges and empty nodes carry no tree structure.
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| ParseError::cell(file, lineno, 1, format!("bad token id {:?}", cols[0])))?;
        if id != current.len() + 1 {
            return Err(ParseError::cell(file, lineno, 1, format!("token id {} out of order (expected {})", id, current.len() + 1)));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| ParseError::cell(file, lineno, 7, format!("bad head index {:?}", cols[6])))?;
        current.push(DepToken {
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            xpos: cols[4].to_string(),
            feats: cols[5].to_string(),
            head,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
        });
    }
    let end = text.lines().count();
    flush(&mut current, end, sentence_start_line)?;
    Ok(trees)
}

fn validate_tree(tree: &DependencyTree, file: &str, start_line: usize, _end_line: usize) -> Result<(), ParseError> {
    let n = tree.tokens.len();
    let mut roots = 0;
    for tok in &tree.tokens {
        if tok.head > n {
            return Err(ParseError::line(
                file,
                start_line + tok.id - 1,
                format!("head {} out of range for a {}-token sentence", tok.head, n),
            ));
        }
        if tok.head == tok.id {
            return Err(ParseError::line(file, start_line + tok.id - 1, format!("token {} is its own head", tok.id)));
        }
        if tok.head == 0 {
            roots += 1;
        }
    }
    if roots == 0 {
        return Err(ParseError::line(file, start_line, "sentence has no root (head 0)"));
    }
    if roots > 1 {
        return Err(ParseError::line(file, start_line, format!("sentence has {roots} roots")));
    }
    // A walk from any token must reach the root in at most n steps.
    for tok in &tree.tokens {
        let mut at = tok.head;
        let mut steps = 0;
        while at != 0 {
            at = tree.tokens[at - 1].head;
            steps += 1;
            if steps > n {
                return Err(ParseError::line(file, start_line + tok.id - 1, format!("head cycle involving token {}", tok.id)));
            }
        }
    }
    Ok(())
}

/// Inverse of [`parse_conllu_str`] for trees without comments or multiword
/// tokens: ten columns, blank line between sentences, trailing newline.
pub fn serialize_conllu(trees: &[DependencyTree]) -> String {
    let blocks: Vec<String> = trees
        .iter()
        .map(|tree| {
            tree.tokens
                .iter()
                .map(|t| {
                    format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        t.id, t.form, t.lemma, t.upos, t.xpos, t.feats, t.head, t.deprel, t.deps, t.misc
                    )
                })
                .collect::<Vec<_>>()
                .join("\n")
        })
        .collect();
    let mut out = blocks.join("\n\n");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: usize, form: &str, head: usize, rel: &str) -> String {
        format!("{id}\t{form}\t{form}\tNOUN\tNN\t_\t{head}\t{rel}\t_\t_")
    }

    #[test]
    fn parses_minimal_tree() {
        let text = format!("{}\n{}\n{}\n", line(1, "the", 2, "det"), line(2, "dog", 0, "root"), line(3, "ran", 2, "dep"));
        let trees = parse_conllu_str(&text, "t").unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].root_id(), 2);
        assert_eq!(trees[0].token(1).unwrap().deprel, "det");
        assert_eq!(trees[0].children_of(2).count(), 2);
    }

    #[test]
    fn rejects_cycle() {
        let text = format!(
            "{}\n{}\n{}\n",
            line(1, "a", 0, "root"),
            line(2, "b", 3, "dep"),
            line(3, "c", 2, "dep")
        );
        let err = parse_conllu_str(&text, "t").unwrap_err();
        assert!(err.to_string().contains("cycle"), "{err}");
    }

    #[test]
    fn rejects_out_of_range_head() {
        let text = format!("{}\n{}\n", line(1, "a", 0, "root"), line(2, "b", 9, "dep"));
        let err = parse_conllu_str(&text, "t").unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn rejects_multiple_roots() {
        let text = format!("{}\n{}\n", line(1, "a", 0, "root"), line(2, "b", 0, "root"));
        let err = parse_conllu_str(&text, "t").unwrap_err();
        assert!(err.to_string().contains("2 roots"));
    }

    #[test]
    fn skips_multiword_and_comment_lines() {
        let text = format!(
            "# sent_id = 1\n1-2\tcannot\t_\t_\t_\t_\t_\t_\t_\t_\n{}\n{}\n",
            line(1, "can", 0, "root"),
            line(2, "not", 1, "advmod")
        );
        let trees = parse_conllu_str(&text, "t").unwrap();
        assert_eq!(trees[0].tokens.len(), 2);
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let text = format!("{}\n{}\n\n{}\n", line(1, "a", 2, "det"), line(2, "b", 0, "root"), line(1, "c", 0, "root"));
        let trees = parse_conllu_str(&text, "t").unwrap();
        let out = serialize_conllu(&trees);
        let reparsed = parse_conllu_str(&out, "t").unwrap();
        assert_eq!(trees, reparsed);
        assert_eq!(out, text);
    }

    #[test]
    fn feat_helper_reads_ud_features() {
        let text = "1\tdogs\tdog\tNOUN\tNNS\tNumber=Plur|Case=Nom\t0\troot\t_\t_\n";
        let trees = parse_conllu_str(text, "t").unwrap();
        assert!(trees[0].token(1).unwrap().has_feat("Number", "Plur"));
        assert!(!trees[0].token(1).unwrap().has_feat("Number", "Sing"));
    }
}
