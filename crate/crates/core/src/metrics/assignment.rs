//! Maximum-weight bipartite assignment (Hungarian method with potentials).

/// Maximum total weight of a partial one-to-one assignment between rows and
/// columns of a non-negative weight matrix. Returns `(total, row -> column)`;
/// rows left unassigned (or assigned to zero-weight padding) map to `None`.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> (i64, Vec<Option<usize>>) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return (0, vec![None; rows]);
    }
    let n = rows.max(cols);
    // Square minimisation problem on cost = -weight, padded with zeros.
    let cost = |i: usize, j: usize| -> i64 {
        if i < rows && j < cols {
            -weights[i][j]
        } else {
            0
        }
    };
    // 1-based arrays, index 0 is the virtual root.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1]; // p[col] = row matched to col
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
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
            for j in 0..=n {
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
    let mut assignment = vec![None; rows];
    let mut total = 0;
    for j in 1..=n {
        let i = p[j];
        if i >= 1 && i <= rows && j <= cols {
            assignment[i - 1] = Some(j - 1);
            total += weights[i - 1][j - 1];
        }
    }
    (total, assignment)
}

/// Among all optimal assignments that only use strictly positive weights,
/// returns the lexicographically smallest one: row 0 takes the smallest
/// feasible column, then row 1, and so on; "unassigned" sorts after every column.
pub fn lexicographic_max_assignment(weights: &[Vec<i64>]) -> (i64, Vec<Option<usize>>) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let (best, _) = max_weight_assignment(weights);
    let mut fixed: Vec<Option<usize>> = vec![None; rows];
    let mut row_done = vec![false; rows];
    let mut col_used = vec![false; cols];
    let mut fixed_total = 0i64;

    // Optimum of the residual problem with decided rows and used columns removed.
    let residual = |row_done: &[bool], col_used: &[bool]| -> i64 {
        let free_rows: Vec<usize> = (0..rows).filter(|&r| !row_done[r]).collect();
        let free_cols: Vec<usize> = (0..cols).filter(|&c| !col_used[c]).collect();
        let sub: Vec<Vec<i64>> = free_rows
            .iter()
            .map(|&r| free_cols.iter().map(|&c| weights[r][c]).collect())
            .collect();
        max_weight_assignment(&sub).0
    };

    for r in 0..rows {
        row_done[r] = true;
        let mut chosen = None;
        for c in 0..cols {
            if col_used[c] || weights[r][c] <= 0 {
                continue;
            }
            col_used[c] = true;
            if fixed_total + weights[r][c] + residual(&row_done, &col_used) == best {
                chosen = Some(c);
                break;
            }
            col_used[c] = false;
        }
        if let Some(c) = chosen {
            fixed[r] = Some(c);
            fixed_total += weights[r][c];
        }
    }
    debug_assert_eq!(fixed_total, best);
    (best, fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Every partial injective row -> column map, by recursion.
    fn brute_force(weights: &[Vec<i64>]) -> i64 {
        fn go(w: &[Vec<i64>], r: usize, used: &mut Vec<bool>) -> i64 {
            if r == w.len() {
                return 0;
            }
            let mut best = go(w, r + 1, used);
            for c in 0..used.len() {
                if !used[c] {
                    used[c] = true;
                    best = best.max(w[r][c] + go(w, r + 1, used));
                    used[c] = false;
                }
            }
            best
        }
        let cols = weights.first().map_or(0, Vec::len);
        go(weights, 0, &mut vec![false; cols])
    }

    #[test]
    fn small_cases() {
        assert_eq!(max_weight_assignment(&[]).0, 0);
        let w = vec![vec![3, 1], vec![2, 2]];
        assert_eq!(max_weight_assignment(&w), (5, vec![Some(0), Some(1)]));
        let w = vec![vec![5], vec![7], vec![1]];
        let (t, a) = max_weight_assignment(&w);
        assert_eq!(t, 7);
        assert_eq!(a.iter().flatten().count(), 1);
    }

    #[test]
    fn lexicographic_tie_break() {
        // one row, two equally good columns -> column 0
        assert_eq!(lexicographic_max_assignment(&[vec![5, 5]]), (5, vec![Some(0)]));
        // zero-weight pairs are never reported
        assert_eq!(lexicographic_max_assignment(&[vec![0, 0], vec![4, 0]]), (4, vec![None, Some(0)]));
        // row 0 prefers column 0 but optimality forces column 1
        let w = vec![vec![3, 3], vec![3, 0]];
        assert_eq!(lexicographic_max_assignment(&w), (6, vec![Some(1), Some(0)]));
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            (r, c) in (1usize..=6, 1usize..=6),
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| if rng.random_bool(0.3) { 0 } else { rng.random_range(0..20) }).collect())
                .collect();
            let oracle = brute_force(&w);
            let (t, a) = max_weight_assignment(&w);
            prop_assert_eq!(t, oracle);
            let (lt, la) = lexicographic_max_assignment(&w);
            prop_assert_eq!(lt, oracle);
            let sum: i64 = la.iter().enumerate().filter_map(|(i, c)| c.map(|c| w[i][c])).sum();
            prop_assert_eq!(sum, oracle);
            prop_assert!(a.len() == r);
            let mut seen = std::collections::HashSet::new();
            for col in la.iter().flatten() {
                prop_assert!(seen.insert(*col));
            }
        }
    }
}
