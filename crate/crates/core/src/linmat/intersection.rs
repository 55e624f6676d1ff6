//! Maximum common independent sets of two matroids given by oracles.

use std::collections::VecDeque;

/// Augments along shortest paths in the exchange graph until none exists.
///
/// Ground elements are `0..n`; each oracle must describe a matroid (down-closed
/// with the exchange property). Paths are found by breadth-first search in
/// index order, so the result is deterministic.
pub fn matroid_intersection(
    n: usize,
    indep1: impl Fn(&[usize]) -> bool,
    indep2: impl Fn(&[usize]) -> bool,
) -> Vec<usize> {
    let mut in_set = vec![false; n];
    loop {
        let current: Vec<usize> = (0..n).filter(|&e| in_set[e]).collect();
        let with = |x: usize| -> Vec<usize> {
            let mut s = current.clone();
            s.push(x);
            s
        };
        let swap = |y: usize, x: usize| -> Vec<usize> {
            let mut s: Vec<usize> = current.iter().copied().filter(|&e| e != y).collect();
            s.push(x);
            s
        };
        let outside: Vec<usize> = (0..n).filter(|&e| !in_set[e]).collect();
        let sources: Vec<usize> = outside
            .iter()
            .copied()
            .filter(|&x| indep1(&with(x)))
            .collect();
        let is_sink: Vec<bool> = (0..n).map(|x| !in_set[x] && indep2(&with(x))).collect();

        let mut prev: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &s in &sources {
            seen[s] = true;
            queue.push_back(s);
        }
        let mut end = None;
        while let Some(v) = queue.pop_front() {
            if !in_set[v] && is_sink[v] {
                end = Some(v);
                break;
            }
            if in_set[v] {
                // v in I: arc v -> x when I - v + x stays independent in M1
                for &x in &outside {
                    if !seen[x] && indep1(&swap(v, x)) {
                        seen[x] = true;
                        prev[x] = Some(v);
                        queue.push_back(x);
                    }
                }
            } else {
                // v outside I: arc v -> y when I - y + v stays independent in M2
                for &y in &current {
                    if !seen[y] && indep2(&swap(y, v)) {
                        seen[y] = true;
                        prev[y] = Some(v);
                        queue.push_back(y);
                    }
                }
            }
        }
        let Some(mut v) = end else {
            return current;
        };
        loop {
            in_set[v] = !in_set[v];
            match prev[v] {
                Some(u) => v = u,
                None => break,
            }
        }
    }
}
