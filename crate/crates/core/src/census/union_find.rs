/// Disjoint sets with path halving and union by size, tracking the number of
/// edges that landed inside each set.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
    edges: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize);
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            edges: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Records edge `{a, b}`, merging the two sets if needed. Returns true on a merge.
    pub fn union_edge(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.edges[ra] += 1;
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        self.edges[ra] += self.edges[rb] + 1;
        true
    }

    pub fn size_of_root(&self, root: usize) -> usize {
        self.size[root] as usize
    }

    pub fn edges_of_root(&self, root: usize) -> usize {
        self.edges[root] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_counts_edges() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union_edge(0, 1));
        assert!(uf.union_edge(1, 2));
        assert!(!uf.union_edge(2, 0));
        let r = uf.find(2);
        assert_eq!(uf.find(0), r);
        assert_eq!((uf.size_of_root(r), uf.edges_of_root(r)), (3, 3));
        assert_ne!(uf.find(3), r);
    }
}
