//! Maximum bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// A maximum matching of the bipartite graph with `left` vertices whose
/// neighbor lists in `0..right` are given by `adj`. Returns the partner of
/// each left vertex.
pub fn maximum_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut pair_l = vec![NIL; left];
    let mut pair_r = vec![NIL; right];
    let mut dist = vec![0usize; left];
    loop {
        // Layer the graph from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if pair_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = pair_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..left {
            if pair_l[u] == NIL {
                augment(u, adj, &mut pair_l, &mut pair_r, &mut dist);
            }
        }
    }
    pair_l.into_iter().map(|v| (v != NIL).then_some(v)).collect()
}

fn augment(u: usize, adj: &[Vec<usize>], pair_l: &mut [usize], pair_r: &mut [usize], dist: &mut [usize]) -> bool {
    for &v in &adj[u] {
        let w = pair_r[v];
        let ok = w == NIL || (dist[w] == dist[u].wrapping_add(1) && augment(w, adj, pair_l, pair_r, dist));
        if ok {
            pair_l[u] = v;
            pair_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// A perfect matching as a bijection `left -> right`, if one exists.
pub fn perfect_matching(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    if adj.len() != right {
        return None;
    }
    maximum_matching(adj, right).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Size of a maximum matching by trying every subset of edges.
    fn brute(adj: &[Vec<usize>], right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &v in &adj[u] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[v] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let (l, r) = (rng.gen_range(0..7), rng.gen_range(0..7));
            let adj: Vec<Vec<usize>> =
                (0..l).map(|_| (0..r).filter(|_| rng.gen_bool(0.35)).collect()).collect();
            let m = maximum_matching(&adj, r);
            let size = m.iter().flatten().count();
            assert_eq!(size, brute(&adj, r));
            let mut seen = vec![false; r];
            for (u, v) in m.iter().enumerate() {
                if let Some(v) = *v {
                    assert!(adj[u].contains(&v) && !seen[v]);
                    seen[v] = true;
                }
            }
        }
    }

    #[test]
    fn perfect_matchings() {
        assert_eq!(perfect_matching(&[vec![1], vec![0, 1]], 2), Some(vec![1, 0]));
        assert_eq!(perfect_matching(&[vec![0], vec![0]], 2), None);
        assert_eq!(perfect_matching(&[], 0), Some(vec![]));
    }
}
