//! Plausibility score grids.
//!
//! One JSON object per line. A grid fixes an event and carries a
//! subject-concept chain, an object-concept chain (both ordered general to
//! specific), and a row-major score matrix: `scores[i][j]` is the score for
//! subject `subject_chain[i]` with object `object_chain[j]`.

use serde::{Deserialize, Serialize};

use super::{Hierarchy, ParseError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreGrid {
    pub event: String,
    pub subject_chain: Vec<String>,
    pub object_chain: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

impl ScoreGrid {
    pub fn rows(&self) -> usize {
        self.subject_chain.len()
    }

    pub fn cols(&self) -> usize {
        self.object_chain.len()
    }
}

pub fn parse_score_grids(
    path: &std::path::Path,
    hierarchy: Option<&Hierarchy>,
) -> Result<Vec<ScoreGrid>, ParseError> {
    let text = super::read_to_string(path)?;
    parse_score_grids_str(&text, &path.display().to_string(), hierarchy)
}

pub fn parse_score_grids_str(
    text: &str,
    file: &str,
    hierarchy: Option<&Hierarchy>,
) -> Result<Vec<ScoreGrid>, ParseError> {
    let mut grids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let grid: ScoreGrid = serde_json::from_str(line)
            .map_err(|e| ParseError::line(file, lineno, format!("bad grid record: {e}")))?;
        if grid.event.is_empty() {
            return Err(ParseError::line(file, lineno, "empty event id"));
        }
        if grid.subject_chain.is_empty() || grid.object_chain.is_empty() {
            return Err(ParseError::line(file, lineno, "empty concept chain"));
        }
        if grid.scores.len() != grid.rows() {
            return Err(ParseError::line(
                file,
                lineno,
                format!("{} score rows for {} subject concepts", grid.scores.len(), grid.rows()),
            ));
        }
        for (r, row) in grid.scores.iter().enumerate() {
            if row.len() != grid.cols() {
                return Err(ParseError::line(
                    file,
                    lineno,
                    format!("score row {r} has {} entries for {} object concepts", row.len(), grid.cols()),
                ));
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(ParseError::line(file, lineno, format!("non-finite score at [{r}][{c}]")));
            }
        }
        if let Some(h) = hierarchy {
            check_chain(h, &grid.subject_chain, "subject", file, lineno)?;
            check_chain(h, &grid.object_chain, "object", file, lineno)?;
        }
        grids.push(grid);
    }
    Ok(grids)
}

/// Every concept must exist and each chain step must move to a strict
/// descendant, so the chain really runs general to specific.
fn check_chain(
    h: &Hierarchy,
    chain: &[String],
    which: &str,
    file: &str,
    lineno: usize,
) -> Result<(), ParseError> {
    for c in chain {
        if !h.contains(c) {
            return Err(ParseError::line(file, lineno, format!("{which} chain names unknown concept {c:?}")));
        }
    }
    for pair in chain.windows(2) {
        if !h.is_ancestor(&pair[0], &pair[1]) {
            return Err(ParseError::line(
                file,
                lineno,
                format!("{which} chain: {:?} is not an ancestor of {:?}", pair[0], pair[1]),
            ));
        }
    }
    Ok(())
}

pub fn serialize_score_grids(grids: &[ScoreGrid]) -> String {
    let mut out = String::new();
    for g in grids {
        out.push_str(&serde_json::to_string(g).expect("grid serializes"));
        out.push('\n');
    }
    out
}
