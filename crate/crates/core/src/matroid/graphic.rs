/// Disjoint-set forest over graph vertices. An edge set is independent in
/// the graphic matroid iff adding its edges never joins a vertex to its own
/// component.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub fn new(len: usize) -> Self {
        DisjointSets {
            parent: (0..len as u32).collect(),
            rank: vec![0; len],
        }
    }

    /// Root lookup without path compression, for shared references.
    pub fn root(&self, mut v: usize) -> usize {
        while self.parent[v] as usize != v {
            v = self.parent[v] as usize;
        }
        v
    }

    pub fn find(&mut self, v: usize) -> usize {
        let root = self.root(v);
        let mut v = v;
        while self.parent[v] as usize != root {
            let next = self.parent[v] as usize;
            self.parent[v] = root as u32;
            v = next;
        }
        root
    }

    /// Merges the components of `a` and `b`; false if already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.root(a) == self.root(b)
    }
}
