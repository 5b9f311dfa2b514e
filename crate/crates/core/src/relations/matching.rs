//! Hopcroft–Karp maximum bipartite matching.

use std::collections::VecDeque;

const NIL: u32 = u32::MAX;

/// Maximum matching of a bipartite graph given as left adjacency lists over
/// right vertices `0..n_right`. Returns the partner of each left vertex.
///
/// Adjacency lists are scanned in order, so equal inputs give equal output.
pub fn hopcroft_karp(adj: &[Vec<u32>], n_right: usize) -> Vec<Option<u32>> {
    let n_left = adj.len();
    let mut match_l = vec![NIL; n_left];
    let mut match_r = vec![NIL; n_right];
    let mut dist = vec![0u32; n_left];
    let mut queue = VecDeque::with_capacity(n_left);

    // greedy warm start
    for (u, nb) in adj.iter().enumerate() {
        if let Some(&v) = nb.iter().find(|&&v| match_r[v as usize] == NIL) {
            match_l[u] = v;
            match_r[v as usize] = u as u32;
        }
    }

    loop {
        queue.clear();
        for u in 0..n_left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = NIL;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u as usize] {
                let w = match_r[v as usize];
                if w == NIL {
                    found = true;
                } else if dist[w as usize] == NIL {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        let mut augmented = false;
        for u in 0..n_left {
            if match_l[u] == NIL && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut it) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    match_l.into_iter().map(|v| (v != NIL).then_some(v)).collect()
}

// Iterative layered DFS, so deep augmenting paths on large inputs cannot
// overflow the stack.
fn augment(
    root: usize,
    adj: &[Vec<u32>],
    match_l: &mut [u32],
    match_r: &mut [u32],
    dist: &mut [u32],
    it: &mut [usize],
) -> bool {
    let mut stack: Vec<usize> = vec![root];
    while let Some(&u) = stack.last() {
        let mut advanced = false;
        while it[u] < adj[u].len() {
            let v = adj[u][it[u]] as usize;
            it[u] += 1;
            let w = match_r[v];
            if w == NIL {
                // flip the path
                let mut v = v as u32;
                for &x in stack.iter().rev() {
                    let prev = match_l[x];
                    match_l[x] = v;
                    match_r[v as usize] = x as u32;
                    v = prev;
                }
                return true;
            }
            if dist[w as usize] == dist[u] + 1 {
                stack.push(w as usize);
                advanced = true;
                break;
            }
        }
        if !advanced {
            dist[u] = NIL;
            stack.pop();
        }
    }
    false
}
