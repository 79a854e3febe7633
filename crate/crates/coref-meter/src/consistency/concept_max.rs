//! Maximum-over-abstractions event scoring.
//!
//! The combiner collapses a score grid to one event score: the hard mode
//! takes the matrix maximum, the soft mode the LogSumExp of all cells.
//! The grid transform rescores each abstraction pair from the sub-grid of
//! its own ancestors (cells at its level or more general on both chains),
//! which makes every chain monotone non-decreasing toward the specific end
//! and therefore free of local extrema.

use crate::corpus::ScoreGrid;

use super::ler;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxMode {
    Hard,
    Soft,
}

/// One score for the whole grid: matrix max (hard) or LogSumExp (soft).
pub fn concept_max(grid: &ScoreGrid, mode: MaxMode) -> f64 {
    let cells = grid.scores.iter().flatten().copied();
    match mode {
        MaxMode::Hard => cells.fold(f64::NEG_INFINITY, f64::max),
        MaxMode::Soft => {
            let m = grid.scores.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = cells.map(|x| (x - m).exp()).sum();
            m + sum.ln()
        }
    }
}

/// Rescores cell (i,j) over its ancestor sub-grid {(i',j') : i' <= i,
/// j' <= j} with the mode's combiner. Chains run general to specific, so
/// index 0 is the most abstract level and its score is unchanged.
///
/// Hard mode is a running prefix max. Soft mode accumulates prefix sums of
/// shifted exponentials with additions only (per-row prefix sums folded
/// down the columns), so the transformed scores are monotone along rows
/// and columns even in floating point.
pub fn concept_max_transform(grid: &ScoreGrid, mode: MaxMode) -> ScoreGrid {
    let rows = grid.rows();
    let cols = grid.cols();
    let mut out = grid.clone();
    match mode {
        MaxMode::Hard => {
            for i in 0..rows {
                for j in 0..cols {
                    let mut best = grid.scores[i][j];
                    if i > 0 {
                        best = best.max(out.scores[i - 1][j]);
                    }
                    if j > 0 {
                        best = best.max(out.scores[i][j - 1]);
                    }
                    out.scores[i][j] = best;
                }
            }
        }
        MaxMode::Soft => {
            let m = grid.scores.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            // col_sums[j] folds the per-row prefix sums downward.
            let mut col_sums = vec![0.0f64; cols];
            for i in 0..rows {
                let mut row_prefix = 0.0f64;
                for (j, col_sum) in col_sums.iter_mut().enumerate() {
                    row_prefix += (grid.scores[i][j] - m).exp();
                    *col_sum += row_prefix;
                    out.scores[i][j] = m + col_sum.ln();
                }
            }
        }
    }
    out
}

/// True when no chain of the grid has a strict local extremum; the
/// transform guarantees this.
pub fn is_extremum_free(grid: &ScoreGrid) -> bool {
    let lines = super::abstraction_windows(grid, super::Axis::BothPaths);
    let windows: Vec<[f64; 3]> = lines.into_iter().flat_map(|l| l.windows).collect();
    ler(&windows).is_none_or(|r| r == 0.0)
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
    fn hard_mode_is_the_matrix_maximum() {
        let g = grid(vec![vec![0.3, -0.2], vec![1.7, 0.4]]);
        assert_eq!(concept_max(&g, MaxMode::Hard), 1.7);
    }

    #[test]
    fn soft_mode_on_two_zero_cells_is_ln_two() {
        let g = grid(vec![vec![0.0, 0.0]]);
        let v = concept_max(&g, MaxMode::Soft);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn soft_dominates_hard_by_at_most_ln_cells() {
        let mut rng = crate::seeding::rng_for(17, "test:conceptmax-bounds");
        for _ in 0..300 {
            let rows = rng.random_range(1..5);
            let cols = rng.random_range(1..5);
            let g = grid(
                (0..rows)
                    .map(|_| (0..cols).map(|_| rng.random_range(-3.0..3.0)).collect())
                    .collect(),
            );
            let hard = concept_max(&g, MaxMode::Hard);
            let soft = concept_max(&g, MaxMode::Soft);
            assert!(g.scores.iter().flatten().all(|&x| hard >= x));
            assert!(soft >= hard - 1e-12, "soft {soft} < hard {hard}");
            let bound = ((rows * cols) as f64).ln();
            assert!(soft - hard <= bound + 1e-12, "gap {} > {bound}", soft - hard);
        }
    }

    #[test]
    fn hard_transform_is_the_prefix_maximum() {
        let g = grid(vec![vec![0.5, 0.1, 0.9], vec![0.2, 0.7, 0.0]]);
        let t = concept_max_transform(&g, MaxMode::Hard);
        assert_eq!(t.scores, vec![vec![0.5, 0.5, 0.9], vec![0.5, 0.7, 0.9]]);
        assert_eq!(t.scores[0][0], g.scores[0][0]);
        assert_eq!(t.scores[1][2], concept_max(&g, MaxMode::Hard));
    }

    #[test]
    fn soft_transform_matches_direct_sub_grid_logsumexp() {
        let g = grid(vec![vec![0.5, -0.1], vec![0.2, 1.3]]);
        let t = concept_max_transform(&g, MaxMode::Soft);
        for i in 0..2 {
            for j in 0..2 {
                let mut cells = Vec::new();
                for i2 in 0..=i {
                    for j2 in 0..=j {
                        cells.push(g.scores[i2][j2]);
                    }
                }
                let m = cells.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let expect = m + cells.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
                assert!((t.scores[i][j] - expect).abs() < 1e-9, "[{i}][{j}]");
            }
        }
    }

    #[test]
    fn transformed_grids_have_no_local_extrema() {
        let mut rng = crate::seeding::rng_for(23, "test:conceptmax-ler");
        for _ in 0..2_000 {
            let rows = rng.random_range(1..6);
            let cols = rng.random_range(1..6);
            let g = grid(
                (0..rows)
                    .map(|_| (0..cols).map(|_| rng.random_range(-4.0..4.0)).collect())
                    .collect(),
            );
            for mode in [MaxMode::Hard, MaxMode::Soft] {
                let t = concept_max_transform(&g, mode);
                assert!(is_extremum_free(&t), "{mode:?} over {:?}", g.scores);
            }
        }
    }
}
