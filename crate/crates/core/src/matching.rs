//! Maximum bipartite matching by augmenting paths (Kuhn's algorithm).
//!
//! Left vertices are tried in index order and adjacency lists are scanned in
//! the order given, so the result is deterministic.

/// Returns, for each left vertex, the right vertex it is matched to.
pub fn max_matching(adj: &[Vec<usize>], right_len: usize) -> Vec<Option<usize>> {
    let mut match_right: Vec<Option<usize>> = vec![None; right_len];
    for left in 0..adj.len() {
        let mut seen = vec![false; right_len];
        augment(left, adj, &mut match_right, &mut seen);
    }
    let mut match_left = vec![None; adj.len()];
    for (r, l) in match_right.iter().enumerate() {
        if let Some(l) = *l {
            match_left[l] = Some(r);
        }
    }
    match_left
}

fn augment(
    left: usize,
    adj: &[Vec<usize>],
    match_right: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &r in &adj[left] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let free = match match_right[r] {
            None => true,
            Some(other) => augment(other, adj, match_right, seen),
        };
        if free {
            match_right[r] = Some(left);
            return true;
        }
    }
    false
}
