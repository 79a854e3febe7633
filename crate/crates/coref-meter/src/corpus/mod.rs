//! Input formats and the shared corpus model.
//!
//! Every parser in this module is pure: it reads one file (or string),
//! returns immutable values plus a list of non-fatal warnings, and reports
//! fatal problems as [`ParseError`] with file/line (and column where it
//! makes sense). Nothing here re-tokenizes; files are trusted to declare
//! their own tokenization and must be UTF-8.

pub mod conll;
pub mod conllu;
pub mod document;
pub mod grid;
pub mod hierarchy;
pub mod jsonl;
pub mod triples;

pub use conll::{parse_conll_coref, parse_conll_coref_str, PartitionSide};
pub use conllu::{parse_conllu, parse_conllu_str, serialize_conllu, DepToken, DependencyTree};
pub use document::{Document, DocumentError, EntityPartition, Mention, PartitionError};
pub use grid::{parse_score_grids, parse_score_grids_str, serialize_score_grids, ScoreGrid};
pub use hierarchy::{parse_hierarchy, parse_hierarchy_str, serialize_hierarchy_edges, serialize_senses, Hierarchy, HierarchyOptions};
pub use jsonl::{parse_docs_jsonl, parse_docs_jsonl_str, serialize_docs_jsonl};
pub use triples::{parse_role_triples_str, parse_triples, parse_triples_str, serialize_roles, serialize_triples, Triple, TripleCounts};

/// Fatal input problem. Warnings (recoverable oddities that drop or adjust
/// a row) travel separately as plain strings alongside parse results.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    // The io::Error text is part of the message, not a source link, so
    // callers that render error chains do not print it twice.
    #[error("{file}: {err}")]
    Io { file: String, err: std::io::Error },
    #[error("{file}:{line}: {msg}")]
    Line { file: String, line: usize, msg: String },
    #[error("{file}:{line}:{col}: {msg}")]
    Cell { file: String, line: usize, col: usize, msg: String },
    #[error("{file}: {msg}")]
    File { file: String, msg: String },
}

impl ParseError {
    pub fn io(file: &str, err: std::io::Error) -> Self {
        ParseError::Io { file: file.to_string(), err }
    }
    pub fn line(file: &str, line: usize, msg: impl Into<String>) -> Self {
        ParseError::Line { file: file.to_string(), line, msg: msg.into() }
    }
    pub fn cell(file: &str, line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError::Cell { file: file.to_string(), line, col, msg: msg.into() }
    }
    pub fn file(file: &str, msg: impl Into<String>) -> Self {
        ParseError::File { file: file.to_string(), msg: msg.into() }
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String, ParseError> {
    std::fs::read_to_string(path).map_err(|e| ParseError::io(&path.display().to_string(), e))
}
