//! Immutable undirected simple graphs in compressed adjacency form.
//!
//! Nodes are dense `0..n` indices. Each node's neighbor list is sorted
//! ascending, and every undirected edge `{u, v}` has a canonical index given
//! by its position among all pairs `u < v` sorted lexicographically. Edge
//! weights, dual variables and incidence operators all use that indexing.

mod generate;
mod io;

pub use generate::{complete, cycle, grid, path, sample_sbm, sbm_blocks, star};
pub use io::{
    load_edge_list, load_edge_list_str, load_weighted_edge_list, read_edge_list_file,
    write_edge_list,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    // canonical edge index of each adjacency slot
    slot_edge: Vec<usize>,
    edges: Vec<(usize, usize)>,
    // original node ids, strictly increasing
    labels: Vec<i64>,
}

impl Graph {
    /// Builds a graph on `num_nodes` nodes. Duplicate pairs and both
    /// orientations of a pair collapse to one undirected edge.
    pub fn from_edges<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels = (0..num_nodes as i64).collect();
        Self::with_labels(labels, edges)
    }

    pub(crate) fn with_labels<I>(labels: Vec<i64>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        debug_assert!(labels.windows(2).all(|w| w[0] < w[1]));
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        canon.dedup();

        let mut degree = vec![0usize; n];
        for &(u, v) in &canon {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * canon.len()];
        let mut slot_edge = vec![0usize; 2 * canon.len()];
        // Lexicographic order of canon means each list fills in ascending
        // order: for node w, first the smaller endpoints u (edges (u, w)),
        // then the larger ones v (edges (w, v)), each ascending.
        for (e, &(u, v)) in canon.iter().enumerate() {
            neighbors[fill[v]] = u;
            slot_edge[fill[v]] = e;
            fill[v] += 1;
        }
        for (e, &(u, v)) in canon.iter().enumerate() {
            neighbors[fill[u]] = v;
            slot_edge[fill[u]] = e;
            fill[u] += 1;
        }
        Ok(Self {
            offsets,
            neighbors,
            slot_edge,
            edges: canon,
            labels,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_nodes()).map(|v| self.degree(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Canonical edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Total number of adjacency slots, i.e. `2 |E|`.
    pub fn num_slots(&self) -> usize {
        self.neighbors.len()
    }

    /// The oriented edge stored in adjacency slot `slot`.
    pub fn slot(&self, slot: usize) -> (usize, usize) {
        let v = self.offsets.partition_point(|&o| o <= slot) - 1;
        (v, self.neighbors[slot])
    }

    /// Canonical index of the undirected edge `{u, v}`.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.num_nodes() || v >= self.num_nodes() {
            return None;
        }
        let base = self.offsets[u];
        self.neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|i| self.slot_edge[base + i])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Original id of node `v`.
    pub fn label(&self, v: usize) -> i64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Dense index of the node carrying original id `label`.
    pub fn index_of(&self, label: i64) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// `out = L x` for the combinatorial Laplacian `L = D - A`.
    pub fn laplacian_apply(&self, x: &[f64], out: &mut [f64]) {
        for v in 0..self.num_nodes() {
            let mut acc = self.degree(v) as f64 * x[v];
            for &w in self.neighbors(v) {
                acc -= x[w];
            }
            out[v] = acc;
        }
    }

    /// Subgraph induced by `nodes` (which must be strictly increasing);
    /// node `i` of the result is `nodes[i]` of `self`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "induced subgraph nodes must be strictly increasing".into(),
            ));
        }
        let mut local = vec![usize::MAX; self.num_nodes()];
        for (i, &v) in nodes.iter().enumerate() {
            if v >= self.num_nodes() {
                return Err(Error::InvalidParameter(format!("node {v} out of range")));
            }
            local[v] = i;
        }
        let edges = self.edges.iter().filter_map(|&(u, v)| {
            (local[u] != usize::MAX && local[v] != usize::MAX).then(|| (local[u], local[v]))
        });
        let labels = nodes.iter().map(|&v| self.labels[v]).collect();
        Graph::with_labels(labels, edges)
    }

    /// Connected component id of every node, numbered in order of first node.
    pub fn components(&self) -> Vec<usize> {
        let n = self.num_nodes();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Full scan of the structural invariants: sorted duplicate-free
    /// neighbor lists, no self-loops, symmetry, and the degree-sum identity.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_nodes();
        let mut degree_sum = 0;
        for v in 0..n {
            let nb = self.neighbors(v);
            degree_sum += nb.len();
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "neighbors of {v} not strictly increasing"
                )));
            }
            for &w in nb {
                if w == v {
                    return Err(Error::InvalidGraph(format!("self-loop on node {v}")));
                }
                if self.neighbors(w).binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "edge ({v}, {w}) not symmetric"
                    )));
                }
            }
        }
        if degree_sum != 2 * self.num_edges() {
            return Err(Error::InvalidGraph("degree sum differs from 2|E|".into()));
        }
        Ok(())
    }
}

/// Stationary law of the uniform-neighbor walk: `pi(v) = deg(v) / 2|E|`.
pub fn node_distribution(graph: &Graph) -> Result<Vec<f64>> {
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let total = graph.num_slots() as f64;
    Ok((0..graph.num_nodes())
        .map(|v| graph.degree(v) as f64 / total)
        .collect())
}

/// Positive weight per undirected edge, indexed canonically.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    values: Vec<f64>,
}

impl EdgeWeights {
    pub fn new(graph: &Graph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_edges(),
                actual: values.len(),
            });
        }
        if let Some(w) = values.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "edge weights must be finite and positive, got {w}"
            )));
        }
        Ok(Self { values })
    }

    pub fn uniform(graph: &Graph, weight: f64) -> Result<Self> {
        Self::new(graph, vec![weight; graph.num_edges()])
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.values[edge]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}
