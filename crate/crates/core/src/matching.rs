//! Maximum bipartite matching by augmenting paths (Kuhn).

/// `adj[u]` lists the right vertices adjacent to left vertex `u`. Returns the
/// partner of every left vertex; lower-index neighbours are tried first.
pub fn max_matching(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; n_right];
    let mut seen = vec![false; n_right];
    for u in 0..adj.len() {
        seen.iter_mut().for_each(|s| *s = false);
        augment(u, adj, &mut match_right, &mut seen);
    }
    let mut match_left = vec![None; adj.len()];
    for (v, u) in match_right.iter().enumerate() {
        if let Some(u) = *u {
            match_left[u] = Some(v);
        }
    }
    match_left
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_right: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if match_right[v].is_none_or(|w| augment(w, adj, match_right, seen)) {
            match_right[v] = Some(u);
            return true;
        }
    }
    false
}

pub fn matching_size(adj: &[Vec<usize>], n_right: usize) -> usize {
    max_matching(adj, n_right).iter().flatten().count()
}

/// Whether every left vertex can be matched simultaneously.
pub fn saturates_left(adj: &[Vec<usize>], n_right: usize) -> bool {
    adj.len() <= n_right && matching_size(adj, n_right) == adj.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hall_violation_detected() {
        // two left vertices competing for one right vertex
        assert!(!saturates_left(&[vec![0], vec![0]], 2));
        assert!(saturates_left(&[vec![0, 1], vec![0]], 2));
    }

    #[test]
    fn augmenting_path_reassigns() {
        let adj = vec![vec![0, 1], vec![0], vec![1, 2]];
        let m = max_matching(&adj, 3);
        assert_eq!(m.iter().flatten().count(), 3);
        assert_eq!(m[1], Some(0));
    }
}
