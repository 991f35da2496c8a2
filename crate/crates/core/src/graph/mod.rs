//! Immutable simple d-regular graphs in compressed adjacency form.
//!
//! Vertices are `0..n`. Every vertex owns a contiguous run of exactly `d`
//! sorted neighbor ids inside one flat array, so the run of vertex `v` is
//! `neighbors[v*d .. (v+1)*d]` and no offset table is needed.
//!
//! The canonical edge enumeration lists every edge once as `(u, v)` with
//! `u < v`, ordered lexicographically. It is not materialized: for each
//! vertex we keep where its "upper" neighbors (those greater than itself)
//! start, and the prefix count of upper neighbors over all earlier vertices.

mod io;

pub use io::{read_graph, read_graph_file, write_graph, write_graph_file};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("graph is not regular: vertex {vertex} has degree {found}, expected {expected}")]
    NotRegular {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("n*d = {n}*{d} is odd")]
    OddDegreeSum { n: usize, d: usize },
    #[error("graph has no vertices or no edges")]
    Empty,
    #[error("adjacency is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A validated simple d-regular graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    d: usize,
    neighbors: Vec<u32>,
    /// Index inside each vertex's run where neighbors greater than the vertex begin.
    upper_start: Vec<u32>,
    /// `edge_offsets[v]` = id of the first canonical edge whose smaller endpoint is `v`.
    edge_offsets: Vec<usize>,
    fingerprint: u64,
}

/// Builds a graph from an unordered list of undirected edges.
///
/// Edge orientation and order do not matter. The degree is inferred and must
/// be the same for every vertex.
pub fn build_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
    if n == 0 || edges.is_empty() {
        return Err(GraphError::Empty);
    }
    if n > u32::MAX as usize {
        return Err(GraphError::VertexOutOfRange { vertex: n, n });
    }
    let mut canon = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        for v in [a, b] {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        canon.push((a.min(b) as u32, a.max(b) as u32));
    }
    canon.sort_unstable();
    if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
        return Err(GraphError::DuplicateEdge(w[0].0 as usize, w[0].1 as usize));
    }

    let mut degree = vec![0usize; n];
    for &(u, v) in &canon {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let d = degree[0];
    if let Some((vertex, &found)) = degree.iter().enumerate().find(|(_, &k)| k != d) {
        return Err(GraphError::NotRegular {
            vertex,
            expected: d,
            found,
        });
    }
    if (n * d) % 2 == 1 {
        return Err(GraphError::OddDegreeSum { n, d });
    }

    // Sorted canonical pairs fill each run in increasing order for the lower
    // endpoint side; the upper endpoint side arrives sorted as well because the
    // list is sorted by (u, v) and every neighbor w < v of v appears as (w, v)
    // with increasing w.
    let mut neighbors = vec![0u32; n * d];
    let mut fill = vec![0usize; n];
    for &(u, v) in &canon {
        let (u, v) = (u as usize, v as usize);
        neighbors[v * d + fill[v]] = u as u32;
        fill[v] += 1;
    }
    for &(u, v) in &canon {
        let (u, v) = (u as usize, v as usize);
        neighbors[u * d + fill[u]] = v as u32;
        fill[u] += 1;
    }
    Ok(Graph::from_parts(n, d, neighbors))
}

impl Graph {
    /// Assembles a graph from a flat neighbor array with per-vertex sorted runs,
    /// validating every invariant.
    pub(crate) fn from_sorted_runs(
        n: usize,
        d: usize,
        neighbors: Vec<u32>,
    ) -> Result<Graph, GraphError> {
        if n == 0 || d == 0 {
            return Err(GraphError::Empty);
        }
        if (n * d) % 2 == 1 {
            return Err(GraphError::OddDegreeSum { n, d });
        }
        if neighbors.len() != n * d {
            return Err(GraphError::NotRegular {
                vertex: 0,
                expected: d,
                found: neighbors.len() / n,
            });
        }
        for v in 0..n {
            let run = &neighbors[v * d..(v + 1) * d];
            for (i, &w) in run.iter().enumerate() {
                let w = w as usize;
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
                if w == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if i > 0 && run[i - 1] as usize >= w {
                    return Err(GraphError::DuplicateEdge(v.min(w), v.max(w)));
                }
                if neighbors[w * d..(w + 1) * d]
                    .binary_search(&(v as u32))
                    .is_err()
                {
                    return Err(GraphError::Asymmetric(v, w));
                }
            }
        }
        Ok(Graph::from_parts(n, d, neighbors))
    }

    /// Same as `from_sorted_runs` for callers that build symmetric, sorted,
    /// loop-free runs by construction.
    pub(crate) fn from_trusted_runs(n: usize, d: usize, neighbors: Vec<u32>) -> Graph {
        assert_eq!(neighbors.len(), n * d);
        Graph::from_parts(n, d, neighbors)
    }

    fn from_parts(n: usize, d: usize, neighbors: Vec<u32>) -> Graph {
        let mut upper_start = Vec::with_capacity(n);
        let mut edge_offsets = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for v in 0..n {
            let run = &neighbors[v * d..(v + 1) * d];
            let start = run.partition_point(|&w| (w as usize) < v);
            upper_start.push(start as u32);
            edge_offsets.push(total);
            total += d - start;
        }
        edge_offsets.push(total);
        debug_assert_eq!(total * 2, n * d);
        let mut fingerprint = crate::rng::mix64(((n as u64) << 32) ^ d as u64);
        for &w in &neighbors {
            fingerprint = crate::rng::mix64(fingerprint ^ w as u64);
        }
        Graph {
            n,
            d,
            neighbors,
            upper_start,
            edge_offsets,
            fingerprint,
        }
    }

    /// Hash of `(n, d, adjacency)`; used to tie percolation samples to their graph.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of edges, `n*d/2`.
    pub fn m(&self) -> usize {
        self.n * self.d / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v * self.d..(v + 1) * self.d]
    }

    /// Neighbors of `v` that are larger than `v`, in increasing order.
    pub fn upper_neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors(v)[self.upper_start[v] as usize..]
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Whether `{u, v}` is an edge. Symmetric; `(v, v)` is always false.
    pub fn edge_between(&self, u: usize, v: usize) -> Result<bool, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.neighbors(u).binary_search(&(v as u32)).is_ok())
    }

    /// Canonical id of edge `{u, v}`, if present.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n || u == v {
            return None;
        }
        let (lo, hi) = (u.min(v), u.max(v));
        self.upper_neighbors(lo)
            .binary_search(&(hi as u32))
            .ok()
            .map(|i| self.edge_offsets[lo] + i)
    }

    /// Endpoints `(u, v)`, `u < v`, of canonical edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        assert!(e < self.m(), "edge id {e} out of range");
        let u = self.edge_offsets.partition_point(|&off| off <= e) - 1;
        let v = self.upper_neighbors(u)[e - self.edge_offsets[u]];
        (u, v as usize)
    }

    /// Id of the first canonical edge whose smaller endpoint is `v`; `v = n` gives `m`.
    pub fn first_edge_of(&self, v: usize) -> usize {
        self.edge_offsets[v]
    }

    /// All edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.upper_neighbors(u).iter().map(move |&v| (u, v as usize)))
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }
}
