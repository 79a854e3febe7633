//! Maximum-weight bipartite assignment over integer weights.
//!
//! Kuhn-Munkres with potentials, O(k^3) for k = max(rows, cols). Weights
//! are `i128` so callers can scale rationals to integers and keep the
//! optimum exact; the matrix is padded to square with zero weights, which
//! leaves surplus rows or columns unmatched.

/// Returns the maximum total weight and, per row, the matched column.
pub fn max_weight_assignment(weights: &[Vec<i128>]) -> (i128, Vec<Option<usize>>) {
    let n = weights.len();
    let m = weights.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return (0, vec![None; n]);
    }
    debug_assert!(weights.iter().all(|r| r.len() == m), "ragged weight matrix");
    let k = n.max(m);
    let max_w = weights.iter().flatten().copied().max().unwrap_or(0);

    // Minimize cost = max_w - weight on the padded square matrix.
    let cost = |i: usize, j: usize| -> i128 {
        if i < n && j < m {
            max_w - weights[i][j]
        } else {
            max_w
        }
    };

    const INF: i128 = i128::MAX / 4;
    let mut u = vec![0i128; k + 1];
    let mut v = vec![0i128; k + 1];
    let mut p = vec![0usize; k + 1]; // p[j] = row matched to column j (1-based)
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![None; n];
    let mut total = 0i128;
    for j in 1..=k {
        let i = p[j];
        if i >= 1 && i <= n && j <= m {
            row_to_col[i - 1] = Some(j - 1);
            total += weights[i - 1][j - 1];
        }
    }
    (total, row_to_col)
}
