//! Simple undirected graphs with dense `u32` node indices.
//!
//! Neighbor lists are kept sorted, so edge queries are binary searches and
//! edge iteration is lexicographic. Self-loops and duplicate edges are
//! rejected at insertion.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    n_edges: usize,
}

impl Graph {
    pub fn new(n_nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n_nodes],
            n_edges: 0,
        }
    }

    /// Builds a graph from an edge iterator, dropping self-loops and
    /// duplicates. Returns the graph and the number of dropped entries.
    pub fn from_edges(n_nodes: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> (Self, usize) {
        let mut g = Self::new(n_nodes);
        let mut dropped = 0;
        for (u, v) in edges {
            if !g.add_edge(u, v) {
                dropped += 1;
            }
        }
        g.sort_adjacency();
        (g, dropped)
    }

    /// Inserts the undirected edge `{u, v}`. Returns `false` for self-loops
    /// and edges already present. Neighbor lists may need [`Self::sort_adjacency`]
    /// afterwards if edges arrive out of lexicographic pair order.
    pub fn add_edge(&mut self, u: u32, v: u32) -> bool {
        assert!((u as usize) < self.adj.len() && (v as usize) < self.adj.len());
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        self.n_edges += 1;
        true
    }

    pub fn sort_adjacency(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let (a, b) = if self.adj[u as usize].len() <= self.adj[v as usize].len() {
            (u, v)
        } else {
            (v, u)
        };
        let list = &self.adj[a as usize];
        if list.is_sorted() {
            list.binary_search(&b).is_ok()
        } else {
            list.contains(&b)
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adj[u as usize].len()
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|l| l.len()).collect()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.n_edges as f64 / self.adj.len() as f64
    }

    /// Edges as lexicographically ordered `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter().copied().filter_map(move |v| (u < v).then_some((u, v)))
        })
    }
}
