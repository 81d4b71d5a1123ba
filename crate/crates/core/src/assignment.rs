//! Exact maximum-weight bipartite assignment.
//!
//! Dense shortest-augmenting-path Hungarian solver (Jonker-Volgenant
//! style) over integer costs. Weights are expected in [0, 1]; they are
//! quantized at 2^-40 resolution, which keeps the solver exact well below
//! any tolerance the scoring functions can distinguish.

/// Result of an assignment: matched (row, col) pairs sorted by row, and
/// the total weight summed from the original floating-point matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub total: f64,
}

const SCALE: f64 = (1u64 << 40) as f64;

/// Maximum-weight assignment of rows to columns. Every row of the smaller
/// side is assigned (weights are non-negative, so a full assignment of the
/// smaller side always attains the maximum matching weight). Ties resolve
/// deterministically by the solver's fixed scan order.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> Assignment {
    let n = weights.len();
    let m = weights.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Assignment { pairs: Vec::new(), total: 0.0 };
    }
    debug_assert!(weights.iter().all(|row| row.len() == m));

    let transposed = n > m;
    let (rows, cols) = if transposed { (m, n) } else { (n, m) };
    let cost_at = |i: usize, j: usize| -> i64 {
        let w = if transposed { weights[j][i] } else { weights[i][j] };
        // Minimization: high weight = low cost.
        (SCALE - (w * SCALE).round()) as i64
    };

    // 1-indexed potentials and matching, after the classic formulation.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; rows + 1];
    let mut v = vec![0i64; cols + 1];
    let mut matched_row = vec![0usize; cols + 1]; // matched_row[j] = row occupying column j
    let mut way = vec![0usize; cols + 1];

    for i in 1..=rows {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost_at(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut pairs = Vec::with_capacity(rows);
    for j in 1..=cols {
        if matched_row[j] != 0 {
            let (row, col) = (matched_row[j] - 1, j - 1);
            if transposed {
                pairs.push((col, row));
            } else {
                pairs.push((row, col));
            }
        }
    }
    pairs.sort_unstable();
    let total = pairs
        .iter()
        .map(|&(i, j)| weights[i][j])
        .sum();
    Assignment { pairs, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive oracle: best injection of the smaller side into the
    /// larger, by brute force.
    fn brute_force(weights: &[Vec<f64>]) -> f64 {
        let n = weights.len();
        let m = weights.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return 0.0;
        }
        fn go(weights: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == weights.len() {
                return 0.0;
            }
            let mut best = f64::NEG_INFINITY;
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    let v = weights[row][j] + go(weights, row + 1, used);
                    used[j] = false;
                    best = best.max(v);
                }
            }
            best
        }
        if n <= m {
            go(weights, 0, &mut vec![false; m])
        } else {
            let t: Vec<Vec<f64>> =
                (0..m).map(|j| (0..n).map(|i| weights[i][j]).collect()).collect();
            go(&t, 0, &mut vec![false; n])
        }
    }

    #[test]
    fn diagonal_dominant_matrix_assigns_diagonal() {
        let w = vec![
            vec![0.9, 0.1, 0.1],
            vec![0.1, 0.8, 0.1],
            vec![0.1, 0.1, 0.7],
        ];
        let a = max_weight_assignment(&w);
        assert_eq!(a.pairs, vec![(0, 0), (1, 1), (2, 2)]);
        assert!((a.total - 2.4).abs() < 1e-12);
    }

    #[test]
    fn empty_inputs_yield_empty_assignment() {
        assert_eq!(max_weight_assignment(&[]).pairs.len(), 0);
        let empty_cols: Vec<Vec<f64>> = vec![vec![], vec![]];
        assert_eq!(max_weight_assignment(&empty_cols).pairs.len(), 0);
    }

    #[test]
    fn rectangular_matrices_assign_smaller_side() {
        let w = vec![vec![0.2, 0.9, 0.3], vec![0.8, 0.4, 0.1]];
        let a = max_weight_assignment(&w);
        assert_eq!(a.pairs.len(), 2);
        assert!((a.total - 1.7).abs() < 1e-12);

        let tall = vec![vec![0.2, 0.8], vec![0.9, 0.4], vec![0.3, 0.1]];
        let b = max_weight_assignment(&tall);
        assert_eq!(b.pairs.len(), 2);
        assert!((b.total - 1.7).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.random_range(1..=7);
            let m = rng.random_range(1..=7);
            let w: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..m).map(|_| (rng.random_range(0..=1000) as f64) / 1000.0).collect())
                .collect();
            let got = max_weight_assignment(&w).total;
            let want = brute_force(&w);
            assert!((got - want).abs() < 1e-9, "got {got}, want {want}, w={w:?}");
        }
    }
}
