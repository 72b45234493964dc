//! Immutable attributed graph.
//!
//! Edges are undirected, stored once in canonical `(i, j)` order with
//! `i < j` and sorted. Adjacency is kept in compressed sparse row form so
//! neighborhood queries and sparse products stay `O(m)`.

use std::collections::HashSet;

use ndarray::Array2;

use crate::error::GraphError;

/// Undirected graph with node attributes and optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    name: String,
    num_nodes: usize,
    num_clusters: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    features: Array2<f64>,
    labels: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a validated graph.
    ///
    /// `edges` may come in any order and orientation but must not contain
    /// self loops or the same unordered pair twice.
    pub fn new(
        name: impl Into<String>,
        num_nodes: usize,
        num_clusters: usize,
        edges: Vec<(usize, usize)>,
        features: Array2<f64>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self, GraphError> {
        if features.nrows() != num_nodes {
            return Err(GraphError::ShapeMismatch {
                what: "features rows",
                expected: num_nodes,
                found: features.nrows(),
            });
        }
        if let Some(labels) = &labels {
            if labels.len() != num_nodes {
                return Err(GraphError::ShapeMismatch { what: "labels", expected: num_nodes, found: labels.len() });
            }
            if let Some((node, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= num_clusters) {
                return Err(GraphError::LabelOutOfRange { node, label, num_clusters });
            }
        }

        let mut canonical = Vec::with_capacity(edges.len());
        for (i, j) in edges {
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if i >= num_nodes || j >= num_nodes {
                return Err(GraphError::NodeOutOfRange { node: i.max(j), num_nodes });
            }
            canonical.push((i.min(j), i.max(j)));
        }
        canonical.sort_unstable();
        if let Some(w) = canonical.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }

        let (offsets, neighbors) = build_csr(num_nodes, &canonical);
        Ok(Self { name: name.into(), num_nodes, num_clusters, edges: canonical, offsets, neighbors, features, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Target cluster count `K`.
    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    /// Canonical sorted edge list, `i < j` for every pair.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.num_nodes).map(|i| self.degree(i) as f64).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.num_nodes && self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Returns a copy with `extra` edges appended. The extra edges are
    /// validated like any other edge.
    pub fn with_extra_edges(&self, extra: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(extra);
        Self::new(
            self.name.clone(),
            self.num_nodes,
            self.num_clusters,
            edges,
            self.features.clone(),
            self.labels.clone(),
        )
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()` in the
    /// given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self, GraphError> {
        let mut local = vec![usize::MAX; self.num_nodes];
        for (pos, &node) in nodes.iter().enumerate() {
            if node >= self.num_nodes {
                return Err(GraphError::NodeOutOfRange { node, num_nodes: self.num_nodes });
            }
            local[node] = pos;
        }
        let mut edges = Vec::new();
        for (pos, &node) in nodes.iter().enumerate() {
            for &nb in self.neighbors(node) {
                let other = local[nb];
                if other != usize::MAX && pos < other {
                    edges.push((pos, other));
                }
            }
        }
        let features = self.features.select(ndarray::Axis(0), nodes);
        let labels = self.labels.as_ref().map(|l| nodes.iter().map(|&n| l[n]).collect());
        Self::new(self.name.clone(), nodes.len(), self.num_clusters, edges, features, labels)
    }

    /// Checks the structural invariants. Construction already enforces
    /// them; this exists for tests and for graphs built by hand.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let set: HashSet<(usize, usize)> = self.edges.iter().copied().collect();
        for i in 0..self.num_nodes {
            for &j in self.neighbors(i) {
                if i == j {
                    return Err(GraphError::SelfLoop(i));
                }
                if !self.neighbors(j).contains(&i) || !set.contains(&(i.min(j), i.max(j))) {
                    return Err(GraphError::AsymmetryDetected(i, j));
                }
            }
        }
        let degree_sum: usize = (0..self.num_nodes).map(|i| self.degree(i)).sum();
        debug_assert_eq!(degree_sum, 2 * self.edges.len());
        Ok(())
    }
}

fn build_csr(num_nodes: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let mut counts = vec![0usize; num_nodes];
    for &(i, j) in edges {
        counts[i] += 1;
        counts[j] += 1;
    }
    let mut offsets = vec![0usize; num_nodes + 1];
    for i in 0..num_nodes {
        offsets[i + 1] = offsets[i] + counts[i];
    }
    let mut cursor = offsets.clone();
    let mut neighbors = vec![0usize; offsets[num_nodes]];
    for &(i, j) in edges {
        neighbors[cursor[i]] = j;
        cursor[i] += 1;
        neighbors[cursor[j]] = i;
        cursor[j] += 1;
    }
    for i in 0..num_nodes {
        neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
    }
    (offsets, neighbors)
}
