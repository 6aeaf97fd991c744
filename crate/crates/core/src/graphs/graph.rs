//! Undirected graphs on nodes `1..=d`, maximal cliques and clique trees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{check_dim, Subset};

/// An undirected simple graph. Adjacency is stored as one bit mask per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    d: usize,
    adj: Vec<usize>,
}

/// Edge-list form used on disk: `{"d": 4, "edges": [[1,2],[1,3],[2,3],[3,4]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub d: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn new(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Graph { d, adj: vec![0; d] })
    }

    /// Builds a graph from 1-based edges. Duplicate edges are merged.
    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(d)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(d: usize) -> Result<Self> {
        let mut g = Graph::new(d)?;
        for u in 1..=d {
            g.adj[u - 1] = Subset::full(d).mask() & !(1 << (u - 1));
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop at node {u}")));
        }
        if u == 0 || v == 0 || u > self.d || v > self.d {
            return Err(Error::InvalidArgument(format!("edge ({u},{v}) outside nodes 1..={}", self.d)));
        }
        self.adj[u - 1] |= 1 << (v - 1);
        self.adj[v - 1] |= 1 << (u - 1);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.adj[u - 1] >> (v - 1)) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> Subset {
        Subset(self.adj[v - 1])
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 1..=self.d {
            for v in u + 1..=self.d {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Node pairs without an edge, sorted.
    pub fn missing_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 1..=self.d {
            for v in u + 1..=self.d {
                if !self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// True iff every pair of nodes in `s` is adjacent.
    pub fn is_complete(&self, s: Subset) -> bool {
        s.vars().iter().all(|&v| s.difference(Subset::from_vars(&[v])).is_subset_of(self.neighbors(v)))
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile { d: self.d, edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect() }
    }

    pub fn from_file(f: &GraphFile) -> Result<Self> {
        let edges: Vec<(usize, usize)> = f.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(f.d, &edges)
    }
}

fn sort_lexicographic(sets: &mut [Subset]) {
    sets.sort_by_key(|s| s.vars());
}

/// All maximal cliques, each as a subset, sorted lexicographically by their node lists.
pub fn cliques(g: &Graph) -> Vec<Subset> {
    let mut out = Vec::new();
    bron_kerbosch(g, 0, Subset::full(g.d).mask(), 0, &mut out);
    sort_lexicographic(&mut out);
    out
}

fn bron_kerbosch(g: &Graph, r: usize, mut p: usize, mut x: usize, out: &mut Vec<Subset>) {
    if p == 0 {
        if x == 0 {
            out.push(Subset(r));
        }
        return;
    }
    // pivot: node of P ∪ X with most neighbours in P
    let pivot = (0..g.d)
        .filter(|u| (p | x) >> u & 1 == 1)
        .max_by_key(|&u| (g.adj[u] & p).count_ones())
        .expect("P is nonempty");
    let mut candidates = p & !g.adj[pivot];
    while candidates != 0 {
        let u = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let bit = 1 << u;
        bron_kerbosch(g, r | bit, p & g.adj[u], x & g.adj[u], out);
        p &= !bit;
        x |= bit;
    }
}

/// Cliques `C_1..C_T` in an order with the running intersection property and
/// separators `S_t = C_{t+1} ∩ (C_1 ∪ … ∪ C_t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueDecomposition {
    pub cliques: Vec<Subset>,
    pub separators: Vec<Subset>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Chordal(CliqueDecomposition),
    NotChordal,
}

impl Decomposition {
    pub fn chordal(self) -> Option<CliqueDecomposition> {
        match self {
            Decomposition::Chordal(c) => Some(c),
            Decomposition::NotChordal => None,
        }
    }
}

/// Maximum cardinality search with the perfect-elimination check; on success
/// the maximal sets `{v} ∪ (earlier neighbours of v)` in visit order form the cliques.
pub fn decompose(g: &Graph) -> Decomposition {
    let d = g.d;
    let mut weight = vec![0usize; d];
    let mut numbered = 0usize;
    let mut order = Vec::with_capacity(d);
    let mut earlier = vec![0usize; d];
    for _ in 0..d {
        let v = (0..d)
            .filter(|&u| numbered >> u & 1 == 0)
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unnumbered node remains");
        earlier[v] = g.adj[v] & numbered;
        numbered |= 1 << v;
        order.push(v);
        for u in 0..d {
            if g.adj[v] >> u & 1 == 1 && numbered >> u & 1 == 0 {
                weight[u] += 1;
            }
        }
    }

    let position: Vec<usize> = {
        let mut pos = vec![0; d];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    };
    for &v in &order {
        let before = earlier[v];
        if before == 0 {
            continue;
        }
        let latest = (0..d).filter(|u| before >> u & 1 == 1).max_by_key(|&u| position[u]).unwrap();
        let rest = before & !(1 << latest);
        if rest & !earlier[latest] != 0 {
            return Decomposition::NotChordal;
        }
    }

    let candidates: Vec<usize> = order.iter().map(|&v| earlier[v] | (1 << v)).collect();
    let cliques: Vec<Subset> = candidates
        .iter()
        .enumerate()
        .filter(|&(i, &c)| {
            !candidates.iter().enumerate().any(|(j, &o)| j != i && c & !o == 0 && (c != o || j < i))
        })
        .map(|(_, &c)| Subset(c))
        .collect();
    let mut seen = 0usize;
    let mut separators = Vec::new();
    for (t, c) in cliques.iter().enumerate() {
        if t > 0 {
            separators.push(Subset(c.mask() & seen));
        }
        seen |= c.mask();
    }
    Decomposition::Chordal(CliqueDecomposition { cliques, separators })
}
