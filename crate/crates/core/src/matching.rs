//! Exact minimum-cost perfect matching on dense square cost matrices.

/// Solves the assignment problem with the shortest-augmenting-path Hungarian method.
///
/// `cost` is row-major `n x n`. Returns `assignment[row] = column`. Runs in O(n³).
pub fn min_cost_assignment(n: usize, cost: &[f64]) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    assert!(cost.iter().all(|c| c.is_finite()), "costs must be finite");
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials; column 0 is a virtual source.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_slack = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        row_of[0] = row;
        let mut col0 = 0;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[col0] = true;
            let r = row_of[col0];
            let mut delta = f64::INFINITY;
            let mut next = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[(r - 1) * n + col - 1] - u[r] - v[col];
                if reduced < min_slack[col] {
                    min_slack[col] = reduced;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    next = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[row_of[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = next;
            if row_of[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            row_of[col0] = row_of[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0; n];
    for col in 1..=n {
        assignment[row_of[col] - 1] = col - 1;
    }
    assignment
}

/// Whether a perfect matching exists using only allowed edges (Kuhn's augmenting paths).
pub fn has_perfect_matching(n: usize, allowed: impl Fn(usize, usize) -> bool) -> bool {
    fn augment(
        row: usize,
        n: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        row_of: &mut [usize],
    ) -> bool {
        for col in 0..n {
            if allowed(row, col) && !seen[col] {
                seen[col] = true;
                if row_of[col] == usize::MAX || augment(row_of[col], n, allowed, seen, row_of) {
                    row_of[col] = row;
                    return true;
                }
            }
        }
        false
    }

    let mut row_of = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    (0..n).all(|row| {
        seen.fill(false);
        augment(row, n, &allowed, &mut seen, &mut row_of)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(n: usize, cost: &[f64], a: &[usize]) -> f64 {
        (0..n).map(|r| cost[r * n + a[r]]).sum()
    }

    fn brute(n: usize, cost: &[f64]) -> f64 {
        fn go(r: usize, n: usize, cost: &[f64], used: &mut [bool], acc: f64, best: &mut f64) {
            if r == n {
                *best = best.min(acc);
                return;
            }
            for c in 0..n {
                if !used[c] {
                    used[c] = true;
                    go(r + 1, n, cost, used, acc + cost[r * n + c], best);
                    used[c] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        go(0, n, cost, &mut vec![false; n], 0.0, &mut best);
        best
    }

    #[test]
    fn small_known_instance() {
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let a = min_cost_assignment(3, &cost);
        assert_eq!(total(3, &cost, &a), 5.0);
        assert_eq!(a, vec![1, 0, 2]);
    }

    #[test]
    fn matches_enumeration() {
        let mut s = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in 1..=6 {
            for _ in 0..20 {
                let cost: Vec<f64> = (0..n * n).map(|_| (next() * 10.0).floor()).collect();
                let a = min_cost_assignment(n, &cost);
                let mut cols = a.clone();
                cols.sort();
                assert_eq!(cols, (0..n).collect::<Vec<_>>());
                assert_eq!(total(n, &cost, &a), brute(n, &cost));
            }
        }
    }

    #[test]
    fn perfect_matching_existence() {
        assert!(has_perfect_matching(2, |r, c| r != c));
        assert!(!has_perfect_matching(2, |_, c| c == 0));
        assert!(has_perfect_matching(0, |_, _| false));
    }
}
