//! Component census of a percolated graph.
//!
//! One union-find pass over the retained edges gives every component's
//! vertex and edge count. Components are classified by excess
//! (edges - vertices): trees have excess -1, unicyclic components 0, and
//! complex components at least 1. The per-size tallies are:
//!
//! * `c[k]`: vertices lying in components of size `k`
//! * `t[k]`: vertices lying in tree components of size `k`
//! * `n_trees[k]`: tree components of size `k`
//! * `u[k]`: unicyclic components of size `k`
//! * `comp[k]`: complex components of size `k`

mod trees;
mod union_find;

pub use trees::{count_trees_tk, MAX_TREE_K};
pub use union_find::UnionFind;

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::Graph;
use crate::percolation::{EdgeMask, PercolationSample};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("sample was drawn on a different graph")]
    SampleGraphMismatch,
    #[error("exact tree counting supports k <= {max}, got {k}")]
    KTooLarge { k: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentClass {
    Tree,
    Unicyclic,
    Complex,
}

impl ComponentClass {
    pub fn of(size: usize, edges: usize) -> Self {
        match edges.cmp(&size) {
            std::cmp::Ordering::Less => ComponentClass::Tree,
            std::cmp::Ordering::Equal => ComponentClass::Unicyclic,
            std::cmp::Ordering::Greater => ComponentClass::Complex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentRecord {
    pub size: usize,
    pub edges: usize,
    pub class: ComponentClass,
    /// Smallest vertex id in the component.
    pub representative: usize,
}

/// Sparse histogram `k -> value`, serialized as an array of `[k, value]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SizeHistogram(BTreeMap<usize, u64>);

impl SizeHistogram {
    pub fn get(&self, k: usize) -> u64 {
        self.0.get(&k).copied().unwrap_or(0)
    }

    fn add(&mut self, k: usize, by: u64) {
        *self.0.entry(k).or_insert(0) += by;
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn max_key(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }
}

impl Serialize for SizeHistogram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|(k, v)| [*k as u64, *v]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentCensus {
    pub n: usize,
    pub retained: usize,
    pub giant_size: usize,
    pub second_size: usize,
    pub giant_edges: usize,
    /// Representative of the largest component (smallest id among ties).
    pub giant_representative: usize,
    #[serde(rename = "C")]
    pub c: SizeHistogram,
    #[serde(rename = "T")]
    pub t: SizeHistogram,
    #[serde(rename = "N")]
    pub n_trees: SizeHistogram,
    #[serde(rename = "U")]
    pub u: SizeHistogram,
    #[serde(rename = "COMP")]
    pub comp: SizeHistogram,
    #[serde(skip)]
    pub records: Vec<ComponentRecord>,
}

/// Census of `sample` on `g`.
pub fn census(g: &Graph, sample: &PercolationSample) -> Result<ComponentCensus, CensusError> {
    if sample.graph_id != g.fingerprint() || sample.mask.len() != g.m() {
        return Err(CensusError::SampleGraphMismatch);
    }
    Ok(census_mask(g, &sample.mask))
}

/// Census of the subgraph of `g` whose edges are the set bits of `mask`.
pub fn census_mask(g: &Graph, mask: &EdgeMask) -> ComponentCensus {
    assert_eq!(mask.len(), g.m(), "mask length must equal edge count");
    let n = g.n();
    let mut uf = UnionFind::new(n);
    // Edge ids ascend, so the lower endpoint is found by a forward cursor.
    let mut u = 0usize;
    let mut retained = 0usize;
    for e in mask.iter_ones() {
        while g.first_edge_of(u + 1) <= e {
            u += 1;
        }
        let v = g.upper_neighbors(u)[e - g.first_edge_of(u)] as usize;
        uf.union_edge(u, v);
        retained += 1;
    }
    from_union_find(n, retained, &mut uf)
}

fn from_union_find(n: usize, retained: usize, uf: &mut UnionFind) -> ComponentCensus {
    let mut slot = vec![u32::MAX; n];
    let mut records: Vec<ComponentRecord> = Vec::new();
    for v in 0..n {
        let root = uf.find(v);
        if slot[root] == u32::MAX {
            slot[root] = records.len() as u32;
            let (size, edges) = (uf.size_of_root(root), uf.edges_of_root(root));
            records.push(ComponentRecord {
                size,
                edges,
                class: ComponentClass::of(size, edges),
                representative: v,
            });
        }
    }

    let mut census = ComponentCensus {
        n,
        retained,
        giant_size: 0,
        second_size: 0,
        giant_edges: 0,
        giant_representative: 0,
        c: SizeHistogram::default(),
        t: SizeHistogram::default(),
        n_trees: SizeHistogram::default(),
        u: SizeHistogram::default(),
        comp: SizeHistogram::default(),
        records: Vec::new(),
    };
    let mut giant: Option<&ComponentRecord> = None;
    for r in &records {
        let k = r.size;
        census.c.add(k, k as u64);
        match r.class {
            ComponentClass::Tree => {
                census.t.add(k, k as u64);
                census.n_trees.add(k, 1);
            }
            ComponentClass::Unicyclic => census.u.add(k, 1),
            ComponentClass::Complex => census.comp.add(k, 1),
        }
        // Records are in representative order, so strict > keeps the smallest id on ties.
        match giant {
            Some(best) if r.size > best.size => {
                census.second_size = best.size;
                giant = Some(r);
            }
            Some(_) => census.second_size = census.second_size.max(r.size),
            None => giant = Some(r),
        }
    }
    if let Some(best) = giant {
        census.giant_size = best.size;
        census.giant_edges = best.edges;
        census.giant_representative = best.representative;
    }
    census.records = records;
    census
}

impl ComponentCensus {
    /// Number of components of size `k`.
    pub fn components_of_size(&self, k: usize) -> u64 {
        self.c.get(k) / k as u64
    }

    pub fn unicyclic_vertices(&self) -> u64 {
        self.u.iter().map(|(k, cnt)| k as u64 * cnt).sum()
    }

    /// Complex components, optionally leaving out the largest component.
    pub fn complex_count(&self, exclude_giant: bool) -> u64 {
        let all = self.comp.total();
        if exclude_giant && self.giant_record().class == ComponentClass::Complex {
            all - 1
        } else {
            all
        }
    }

    pub fn giant_record(&self) -> ComponentRecord {
        *self
            .records
            .iter()
            .find(|r| r.representative == self.giant_representative)
            .expect("census has at least one component")
    }

    /// Sizes of components other than the largest one that fall in `[lo, hi]`.
    pub fn non_giant_sizes_in(&self, lo: f64, hi: f64) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| r.representative != self.giant_representative)
            .map(|r| r.size)
            .filter(|&k| (k as f64) >= lo && (k as f64) <= hi)
            .collect()
    }
}

/// `(giant_size / n, giant_edges / giant_size)`.
pub fn giant_ratio(census: &ComponentCensus) -> (f64, f64) {
    (
        census.giant_size as f64 / census.n as f64,
        census.giant_edges as f64 / census.giant_size as f64,
    )
}

/// `(largest k with N_k > 0, sum_k T_k / n)`. The size is 0 when no tree exists.
pub fn isolated_tree_spectrum(census: &ComponentCensus) -> (usize, f64) {
    (
        census.n_trees.max_key().unwrap_or(0),
        census.t.total() as f64 / census.n as f64,
    )
}
