//! Consistency metrics over plausibility score grids.
//!
//! A score grid holds one event's plausibility estimate at every pair of
//! abstraction levels. Sliding a three-wide window along each axis-aligned
//! line of the grid (one hypernym chain varying, the other argument fixed)
//! gives the units both metrics are defined over:
//!
//! * concavity delta: how far each window dips below the midpoint of its
//!   neighbors, averaged over all windows (0 for concave or linear lines);
//! * local extremum rate: the fraction of windows whose center is a strict
//!   local minimum or maximum.
//!
//! Lines shorter than three cells yield no windows; metrics over zero
//! windows are undefined and reported as `None`/null, never 0, so corpus
//! averages are not diluted. [`concept_max`] holds the maximum-over-
//! abstractions event combiner, [`auc`] the labeled-event evaluation.

pub mod auc;
pub mod concept_max;

use serde::{Deserialize, Serialize};

use crate::corpus::ScoreGrid;

pub use auc::{auc, parse_labeled_events_str, parse_scored_events_str, AucError, Label, LabeledEvent};
pub use concept_max::{concept_max, concept_max_transform, MaxMode};

/// Which hypernym chain varies within a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Subject,
    Object,
    /// Object-axis lines (grid rows) followed by subject-axis lines
    /// (grid columns).
    BothPaths,
}

/// All windows from one grid line: the fixed argument stays at
/// `line`, the varying chain moves general to specific.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainWindows {
    pub axis: Axis,
    pub line: usize,
    pub windows: Vec<[f64; 3]>,
}

/// Consecutive score triples along every requested grid line.
///
/// A row of the score matrix varies the object chain (subject fixed), a
/// column varies the subject chain. `BothPaths` emits rows first, then
/// columns; each line appears even when too short to yield windows.
pub fn abstraction_windows(grid: &ScoreGrid, axis: Axis) -> Vec<ChainWindows> {
    let mut out = Vec::new();
    if matches!(axis, Axis::Object | Axis::BothPaths) {
        for (i, row) in grid.scores.iter().enumerate() {
            out.push(ChainWindows { axis: Axis::Object, line: i, windows: line_windows(row) });
        }
    }
    if matches!(axis, Axis::Subject | Axis::BothPaths) {
        for j in 0..grid.cols() {
            let col: Vec<f64> = grid.scores.iter().map(|row| row[j]).collect();
            out.push(ChainWindows { axis: Axis::Subject, line: j, windows: line_windows(&col) });
        }
    }
    out
}

fn line_windows(scores: &[f64]) -> Vec<[f64; 3]> {
    scores.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
}

/// Mean divergence from concavity: each window contributes
/// `(a+c)/2 - b` when `2b < a+c`, else 0. `None` without windows.
pub fn ccd<'a>(windows: impl IntoIterator<Item = &'a [f64; 3]>) -> Option<f64> {
    let mut total = 0.0;
    let mut n = 0usize;
    for &[a, b, c] in windows {
        if 2.0 * b < a + c {
            total += 0.5 * (a + c) - b;
        }
        n += 1;
    }
    (n > 0).then(|| total / n as f64)
}

/// Fraction of windows whose center is a strict local extremum.
/// Plateaus do not count. `None` without windows.
pub fn ler<'a>(windows: impl IntoIterator<Item = &'a [f64; 3]>) -> Option<f64> {
    let mut extrema = 0usize;
    let mut n = 0usize;
    for &[a, b, c] in windows {
        if b > a.max(c) || b < a.min(c) {
            extrema += 1;
        }
        n += 1;
    }
    (n > 0).then(|| extrema as f64 / n as f64)
}

/// Both metrics plus the window count they were computed over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisScores {
    pub ccd: Option<f64>,
    pub ler: Option<f64>,
    pub windows: usize,
}

impl AxisScores {
    fn over(windows: &[[f64; 3]]) -> AxisScores {
        AxisScores { ccd: ccd(windows), ler: ler(windows), windows: windows.len() }
    }
}

/// Per-grid consistency scores: pooled over both axes (the headline
/// numbers) plus the per-axis breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub pooled: AxisScores,
    pub subject_axis: AxisScores,
    pub object_axis: AxisScores,
}

pub fn consistency_report(grid: &ScoreGrid) -> ConsistencyReport {
    reported(abstraction_windows(grid, Axis::BothPaths))
}

/// One report over the concatenated windows of many grids, in grid order.
/// Grids without windows contribute nothing rather than zeros.
pub fn pooled_consistency(grids: &[ScoreGrid]) -> ConsistencyReport {
    reported(grids.iter().flat_map(|g| abstraction_windows(g, Axis::BothPaths)).collect())
}

fn reported(lines: Vec<ChainWindows>) -> ConsistencyReport {
    let mut pooled = Vec::new();
    let mut subject = Vec::new();
    let mut object = Vec::new();
    for line in lines {
        let bucket = match line.axis {
            Axis::Subject => &mut subject,
            Axis::Object => &mut object,
            Axis::BothPaths => unreachable!("lines carry a concrete axis"),
        };
        bucket.extend_from_slice(&line.windows);
        pooled.extend_from_slice(&line.windows);
    }
    ConsistencyReport {
        pooled: AxisScores::over(&pooled),
        subject_axis: AxisScores::over(&subject),
        object_axis: AxisScores::over(&object),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn grid(scores: Vec<Vec<f64>>) -> ScoreGrid {
        let rows = scores.len();
        let cols = scores[0].len();
        ScoreGrid {
            event: "e".into(),
            subject_chain: (0..rows).map(|i| format!("s{i}")).collect(),
            object_chain: (0..cols).map(|j| format!("o{j}")).collect(),
            scores,
        }
    }

    #[test]
    fn window_counts_match_the_grid_shape() {
        // 1x5: one row with 3 windows, five length-1 columns with none.
        let g = grid(vec![vec![0.1, 0.2, 0.3, 0.4, 0.5]]);
        let lines = abstraction_windows(&g, Axis::BothPaths);
        let total: usize = lines.iter().map(|l| l.windows.len()).sum();
        assert_eq!(total, 3);

        let g = grid(vec![vec![0.1, 0.2], vec![0.3, 0.4]]);
        let total: usize = abstraction_windows(&g, Axis::BothPaths).iter().map(|l| l.windows.len()).sum();
        assert_eq!(total, 0);

        let g = grid(vec![vec![0.0; 3]; 3]);
        let total: usize = abstraction_windows(&g, Axis::BothPaths).iter().map(|l| l.windows.len()).sum();
        assert_eq!(total, 3 * 1 + 3 * 1);
    }

    #[test]
    fn both_paths_emits_rows_then_columns() {
        let g = grid(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![7.0, 8.0, 9.0]]);
        let lines = abstraction_windows(&g, Axis::BothPaths);
        assert_eq!(lines.len(), 6);
        assert!(lines[..3].iter().all(|l| l.axis == Axis::Object));
        assert!(lines[3..].iter().all(|l| l.axis == Axis::Subject));
        assert_eq!(lines[0].windows, vec![[1.0, 2.0, 3.0]]);
        assert_eq!(lines[3].windows, vec![[1.0, 4.0, 7.0]]);
    }

    #[test]
    fn single_axis_requests_take_matching_lines_only() {
        let g = grid(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let rows = abstraction_windows(&g, Axis::Object);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|l| l.axis == Axis::Object));
        let cols = abstraction_windows(&g, Axis::Subject);
        assert_eq!(cols.len(), 3);
        assert!(cols.iter().all(|l| l.windows.is_empty()));
    }

    #[test]
    fn ccd_hand_cases() {
        assert_eq!(ccd([[0.2, 0.8, 0.3]].iter()), Some(0.0));
        let v = ccd([[0.8, 0.2, 0.9]].iter()).unwrap();
        assert!((v - 0.65).abs() < 1e-12);
        assert_eq!(ccd(std::iter::empty::<&[f64; 3]>()), None);
    }

    #[test]
    fn ccd_of_linear_sequences_is_zero() {
        let seq: Vec<f64> = (0..10).map(|i| 0.3 + 0.05 * i as f64).collect();
        let windows = line_windows(&seq);
        assert_eq!(ccd(windows.iter()), Some(0.0));
    }

    #[test]
    fn ler_hand_cases() {
        let windows = line_windows(&[0.1, 0.5, 0.2, 0.4]);
        assert_eq!(ler(windows.iter()), Some(1.0));
        let mono = line_windows(&[0.1, 0.2, 0.3, 0.9]);
        assert_eq!(ler(mono.iter()), Some(0.0));
        let flat = line_windows(&[0.4, 0.4, 0.4, 0.4]);
        assert_eq!(ler(flat.iter()), Some(0.0));
        assert_eq!(ler(std::iter::empty::<&[f64; 3]>()), None);
    }

    #[test]
    fn metrics_are_shift_invariant_and_ccd_scales() {
        let mut rng = crate::seeding::rng_for(3, "test:consistency-shift");
        for _ in 0..200 {
            let seq: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
            let shifted: Vec<f64> = seq.iter().map(|x| x + 5.0).collect();
            let scaled: Vec<f64> = seq.iter().map(|x| x * 3.0).collect();
            let w = line_windows(&seq);
            let ws = line_windows(&shifted);
            let wk = line_windows(&scaled);
            assert!((ccd(w.iter()).unwrap() - ccd(ws.iter()).unwrap()).abs() < 1e-9);
            assert_eq!(ler(w.iter()), ler(ws.iter()));
            assert!((3.0 * ccd(w.iter()).unwrap() - ccd(wk.iter()).unwrap()).abs() < 1e-9);
            // Any strictly monotone transform preserves extremum structure.
            let warped: Vec<f64> = seq.iter().map(|x| x.exp()).collect();
            let ww = line_windows(&warped);
            assert_eq!(ler(w.iter()), ler(ww.iter()));
        }
    }

    #[test]
    fn report_pools_both_axes_and_splits_them() {
        // Rows are linear (no violations); columns dip in the middle.
        let g = grid(vec![
            vec![0.1, 0.2, 0.3],
            vec![0.0, 0.1, 0.2],
            vec![0.5, 0.6, 0.7],
        ]);
        let r = consistency_report(&g);
        assert_eq!(r.object_axis.windows, 3);
        assert_eq!(r.subject_axis.windows, 3);
        assert_eq!(r.pooled.windows, 6);
        assert_eq!(r.object_axis.ler, Some(0.0));
        assert_eq!(r.subject_axis.ler, Some(1.0));
        assert_eq!(r.pooled.ler, Some(0.5));
        // Column windows are (0.1, 0.0, 0.5) etc: delta = 0.3 - 0.0 = 0.3 each.
        assert!((r.subject_axis.ccd.unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(r.object_axis.ccd, Some(0.0));
        assert!((r.pooled.ccd.unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn degenerate_grids_report_null_not_zero() {
        let g = grid(vec![vec![0.4, 0.9], vec![0.1, 0.3]]);
        let r = consistency_report(&g);
        assert_eq!(r.pooled.windows, 0);
        assert_eq!(r.pooled.ccd, None);
        assert_eq!(r.pooled.ler, None);
        let json = serde_json::to_string(&r.pooled).unwrap();
        assert_eq!(json, r#"{"ccd":null,"ler":null,"windows":0}"#);
    }

    #[test]
    fn pooling_many_grids_skips_windowless_ones() {
        let small = grid(vec![vec![0.4, 0.9], vec![0.1, 0.3]]);
        let big = grid(vec![vec![0.1, 0.2, 0.3]]);
        let r = pooled_consistency(&[small, big]);
        assert_eq!(r.pooled.windows, 1);
        assert_eq!(r.pooled.ccd, Some(0.0));
    }
}
