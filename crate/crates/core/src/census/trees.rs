//! Exact count of k-vertex trees contained in a graph.
//!
//! A tree is counted once per (vertex set, edge set) pair, so a vertex set
//! whose induced subgraph has several spanning trees contributes all of them.
//! Connected k-subsets are enumerated with ESU (each subset exactly once) and
//! their spanning trees counted with the matrix-tree theorem.

use super::CensusError;
use crate::graph::Graph;

pub const MAX_TREE_K: usize = 7;

/// Number of trees on exactly `k` vertices that are subgraphs of `g`.
pub fn count_trees_tk(g: &Graph, k: usize) -> Result<u64, CensusError> {
    if k > MAX_TREE_K {
        return Err(CensusError::KTooLarge { k, max: MAX_TREE_K });
    }
    match k {
        0 => return Ok(0),
        1 => return Ok(g.n() as u64),
        2 => return Ok(g.m() as u64),
        _ => {}
    }
    let mut total = 0u64;
    let mut sub = Vec::with_capacity(k);
    for v in 0..g.n() {
        sub.push(v);
        let ext: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&w| w as usize)
            .filter(|&w| w > v)
            .collect();
        extend(g, k, v, &mut sub, ext, &mut total);
        sub.pop();
    }
    Ok(total)
}

fn adjacent(g: &Graph, a: usize, b: usize) -> bool {
    g.neighbors(a).binary_search(&(b as u32)).is_ok()
}

fn extend(g: &Graph, k: usize, root: usize, sub: &mut Vec<usize>, mut ext: Vec<usize>, total: &mut u64) {
    if sub.len() == k {
        *total += spanning_trees(g, sub);
        return;
    }
    while let Some(w) = ext.pop() {
        // Exclusive neighbors of w: larger than the root, outside the current
        // subset and not adjacent to any vertex already in it.
        let mut next = ext.clone();
        for &x in g.neighbors(w) {
            let x = x as usize;
            if x > root
                && !sub.contains(&x)
                && x != w
                && !next.contains(&x)
                && !sub.iter().any(|&s| adjacent(g, s, x))
            {
                next.push(x);
            }
        }
        sub.push(w);
        extend(g, k, root, sub, next, total);
        sub.pop();
    }
}

/// Spanning trees of the subgraph induced by `verts` (Kirchhoff).
fn spanning_trees(g: &Graph, verts: &[usize]) -> u64 {
    let k = verts.len();
    let size = k - 1;
    let mut lap = vec![vec![0i128; size]; size];
    for i in 0..size {
        for j in 0..k {
            if i != j && adjacent(g, verts[i], verts[j]) {
                lap[i][i] += 1;
                if j < size {
                    lap[i][j] = -1;
                }
            }
        }
    }
    bareiss_det(lap) as u64
}

/// Fraction-free Gaussian elimination; exact for integer matrices.
fn bareiss_det(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for p in 0..n - 1 {
        if a[p][p] == 0 {
            match (p + 1..n).find(|&r| a[r][p] != 0) {
                Some(r) => {
                    a.swap(p, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
            }
        }
        prev = a[p][p];
    }
    sign * a[n - 1][n - 1]
}
