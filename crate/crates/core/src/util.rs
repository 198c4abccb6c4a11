//! Small shared helpers.

/// Union-find over `0..n` with path compression.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            // Always hang the larger index below the smaller one so that the
            // root of each class is its least element.
            if ri < rj {
                self.parent[rj] = ri;
            } else {
                self.parent[ri] = rj;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// Blocks sorted by least member; block ids follow that order.
    pub fn blocks(&mut self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let n = self.len();
        let mut block_of = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if block_of[r] == usize::MAX {
                block_of[r] = blocks.len();
                blocks.push(Vec::new());
            }
            block_of[i] = block_of[r];
            blocks[block_of[r]].push(i);
        }
        (block_of, blocks)
    }
}
